"""Cartan prolongation inside a finite vectorial algebra, the homomorphism
q(n+1) -> vect(n|n), main parts, and the comparison of queerified prolongs
with prolongs of queerified data."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .errors import InconsistentEmbedding, NotHomogeneous, NotRestricted, WrongCharacteristic
from .ffield import FieldCtx
from .linalg import Echelon, Subspace, kernel_rows
from .superalg import SuperAlgebra
from .vectorial import DividedPowerCtx, VectorFields

Field = dict


def zxi_ambient(n: int, ctx: FieldCtx, n_odd: int | None = None, N: Sequence[int] | None = None) -> VectorFields:
    """vect(n; N | n_odd) on z_1..z_n (even) and xi_1..xi_n_odd (odd), N defaults to (1,...,1)."""
    n_odd = n if n_odd is None else n_odd
    dp = DividedPowerCtx(ctx, n, list(N) if N is not None else [1] * n, n_odd,
                         even_names=[f"z{i + 1}" for i in range(n)],
                         odd_names=[f"xi{i + 1}" for i in range(n_odd)])
    return VectorFields(dp)


def _sparse_add(ctx: FieldCtx, acc: dict, X: dict, c: int = 1) -> dict:
    for k, v in X.items():
        acc[k] = ctx.add(acc.get(k, 0), ctx.mul(c, v))
    return {k: v for k, v in acc.items() if v}


def _field(vf: VectorFields, coeff_mono_var: Sequence[tuple[int, dict, int]]) -> Field:
    """sum c * f * d_var with f a function (sparse monomial dict)."""
    ctx = vf.ctx
    out: dict[int, int] = {}
    for c, f, var in coeff_mono_var:
        for mono, a in f.items():
            idx = vf.basis_index(mono, var)
            out[idx] = ctx.add(out.get(idx, 0), ctx.mul(c, a))
    return {k: v for k, v in out.items() if v}


def _var(vf: VectorFields, j: int) -> dict:
    return {vf.dp.variable(j): 1}


@dataclass
class GradedEmbedding:
    """Non-positive part of a graded algebra realized inside ``ambient``.

    ``components[d]`` lists homogeneous fields spanning the degree-d part.
    """

    ambient: VectorFields
    components: dict[int, list[Field]]
    label: str = ""

    def subspace(self, d: int) -> Subspace:
        vf = self.ambient
        return Subspace(vf.ctx, vf.dim, [vf.dense(f) for f in self.components.get(d, [])])

    def validate(self) -> None:
        vf = self.ambient
        for d, fields in self.components.items():
            for f in fields:
                if not f:
                    continue
                degs = {vf.degree(i) for i in f}
                if degs != {d} or vf.field_parity(f) is None:
                    raise InconsistentEmbedding(f"a field listed in degree {d} is not homogeneous of that degree")
        minus = self.subspace(-1)
        for d in self.components:
            if d > 0:
                raise InconsistentEmbedding("only non-positive components may be supplied")
        for x in self.components.get(0, []):
            for y in self.components.get(-1, []):
                if not minus.contains(vf.dense(vf.bracket(x, y))):
                    raise InconsistentEmbedding("[g_0, g_-1] is not inside g_-1")


@dataclass
class ProlongResult:
    embedding: GradedEmbedding
    components: dict[int, list[Field]]
    stabilized_at: int | None
    total: SuperAlgebra | None = None

    def dims(self) -> dict[int, tuple[int, int]]:
        vf = self.embedding.ambient
        out = {}
        for d, fields in sorted(self.components.items()):
            ev = sum(1 for f in fields if vf.field_parity(f) == 0)
            out[d] = (ev, len(fields) - ev)
        return out

    def subspace(self, d: int) -> Subspace:
        vf = self.embedding.ambient
        return Subspace(vf.ctx, vf.dim, [vf.dense(f) for f in self.components.get(d, [])])

    def sdim(self) -> tuple[int, int]:
        ev = sum(e for e, _ in self.dims().values())
        od = sum(o for _, o in self.dims().values())
        return ev, od


def _homogeneous_basis(vf: VectorFields, fields: Sequence[Field]) -> list[Field]:
    """Split each field into parity parts and keep an independent set."""
    ech = Echelon(vf.ctx, vf.dim)
    out = []
    for f in fields:
        parts: dict[int, dict] = {}
        for k, c in f.items():
            parts.setdefault(vf.parity(k), {})[k] = c
        for par in sorted(parts):
            if ech.add(vf.dense(parts[par])) is not None:
                out.append(parts[par])
    return out


def cartan_prolong(e: GradedEmbedding, max_degree: int | None = None) -> ProlongResult:
    """g_k = {X in W_k : [X, g_-1] in g_(k-1)} for k = 1, 2, ... inside the ambient W."""
    e.validate()
    vf = e.ambient
    ctx = vf.ctx
    top = max(vf.degrees())
    if max_degree is not None:
        top = min(top, max_degree)
    minus = [f for f in e.components.get(-1, []) if f]
    comps = {d: _homogeneous_basis(vf, fs) for d, fs in e.components.items()}
    prev = Subspace(ctx, vf.dim, [vf.dense(f) for f in comps.get(0, [])])
    stabilized = None
    for k in range(1, top + 1):
        found: list[Field] = []
        for parity in (0, 1):
            cand = [i for i in vf.degree_indices(k) if vf.parity(i) == parity]
            if not cand:
                continue
            rows_by_probe = []
            for y in minus:
                cols = []
                for i in cand:
                    w = vf.dense(vf.bracket({i: 1}, y))
                    cols.append(prev.reduce(w))
                rows_by_probe.append(cols)
            rows = []
            for cols in rows_by_probe:
                support = sorted({r for col in cols for r, x in enumerate(col) if x})
                for r in support:
                    rows.append([col[r] for col in cols])
            for vec in kernel_rows(ctx, rows, len(cand)):
                found.append({cand[t]: x for t, x in enumerate(vec) if x})
        comps[k] = found
        if not found:
            stabilized = k
            break
        prev = Subspace(ctx, vf.dim, [vf.dense(f) for f in found])
    res = ProlongResult(e, dict(sorted(comps.items())), stabilized)
    fields = [f for d in sorted(res.components) for f in res.components[d]]
    res.total = vf.algebra(fields, meta={"construction": "prolong", "label": e.label})
    return res


# -- the homomorphism q(n+1) -> vect(n|n) ----------------------------------------------------------

@dataclass
class PhiReport:
    embedding: GradedEmbedding
    images: dict[str, Field]
    degrees: dict[str, int]
    kernel: list[dict[str, int]]
    homomorphism_violations: list[tuple[str, str]]
    degree_one_dead: bool
    j_field: Field = field(default_factory=dict)


def q_basis_names(n: int) -> list[tuple[str, int, int, int]]:
    """(name, parity, i, j) for the basis E_ij, X_ij of q(n+1), indices 0..n."""
    out = []
    for par, tag in ((0, "E"), (1, "X")):
        for i in range(n + 1):
            for j in range(n + 1):
                out.append((f"{tag}{i}{j}", par, i, j))
    return out


def phi_image(vf: VectorFields, n: int, tag: str, i: int, j: int) -> Field:
    """Image of E_ij / X_ij (indices 0..n, index 0 special) as a vector field."""
    ctx = vf.ctx
    neg = ctx.neg
    one = {vf.dp.unit_index(): 1}
    z = lambda k: k - 1          # noqa: E731 - variable index of z_k
    xi = lambda k: n + k - 1     # noqa: E731 - variable index of xi_k
    if i == 0 and j > 0:
        return _field(vf, [(1, one, z(j) if tag == "E" else xi(j))])
    if i > 0 and j > 0:
        zi, xii = _var(vf, z(i)), _var(vf, xi(i))
        if tag == "E":
            return _field(vf, [(1, zi, z(j)), (1, xii, xi(j))])
        return _field(vf, [(1, zi, xi(j)), (1, xii, z(j))])
    if i == 0 and j == 0:
        terms = []
        for k in range(1, n + 1):
            zk, xik = _var(vf, z(k)), _var(vf, xi(k))
            if tag == "E":
                terms += [(neg(1), zk, z(k)), (neg(1), xik, xi(k))]
            else:
                terms += [(neg(1), zk, xi(k)), (1, xik, z(k))]
        return _field(vf, terms)
    # i > 0, j == 0
    dp = vf.dp
    zi, xii = _var(vf, z(i)), _var(vf, xi(i))
    terms = []
    for k in range(1, n + 1):
        zk, xik = _var(vf, z(k)), _var(vf, xi(k))
        if tag == "E":
            terms += [(neg(1), dp.mul(zi, zk), z(k)), (neg(1), dp.mul(zi, xik), xi(k)),
                      (neg(1), dp.mul(xii, zk), xi(k)), (1, dp.mul(xii, xik), z(k))]
        else:
            terms += [(neg(1), dp.mul(zi, zk), xi(k)), (1, dp.mul(zi, xik), z(k)),
                      (neg(1), dp.mul(xii, zk), z(k)), (neg(1), dp.mul(xii, xik), xi(k))]
    return _field(vf, terms)


def embed_phi(n: int, ctx: FieldCtx, with_J: bool = True, vf: VectorFields | None = None) -> PhiReport:
    """Realize q(n+1) in vect(n; N_s | n) and report kernel and homomorphism defects.

    The returned embedding holds the non-positive part: degree -1 is the
    image of E_0i, X_0i; degree 0 the image of q(n) (E_ij, X_ij with i, j > 0)
    plus, if ``with_J``, the image of E_00 and X_00.
    """
    from .catalog import q as q_family

    if n < 1:
        raise InconsistentEmbedding("n must be at least 1")
    vf = vf or zxi_ambient(n, ctx)
    basis = q_basis_names(n)
    images = {name: phi_image(vf, n, "E" if par == 0 else "X", i, j) for name, par, i, j in basis}
    deg = {}
    for name, par, i, j in basis:
        deg[name] = (1 if i > 0 else 0) - (1 if j > 0 else 0)
    # kernel of the linear map
    names = [b[0] for b in basis]
    cols = [vf.dense(images[nm]) for nm in names]
    rows = [[c[r] for c in cols] for r in range(vf.dim) if any(c[r] for c in cols)]
    kernel = [{names[t]: x for t, x in enumerate(v) if x} for v in kernel_rows(ctx, rows, len(names))]
    # homomorphism check against the matrix model of q(n+1)
    qm = q_family(n + 1, ctx)
    model_names = {}
    for idx, nm in enumerate(qm.names):
        if nm.startswith("Pi(E"):
            model_names[idx] = "X" + _zero_based(nm[4:-1])
        else:
            model_names[idx] = "E" + _zero_based(nm[1:])
    name_to_model = {v: k for k, v in model_names.items()}
    violations = []
    for a in names:
        for b in names:
            ia, ib = name_to_model[a], name_to_model[b]
            if ia > ib:
                continue
            br = qm.bracket_basis(ia, ib)
            lhs: dict = {}
            for k, c in enumerate(br):
                if c:
                    lhs = _sparse_add(ctx, lhs, images[model_names[k]], c)
            rhs = vf.bracket(images[a], images[b])
            if lhs != rhs:
                violations.append((a, b))
    deg_one = [nm for nm in names if deg[nm] == 1]
    dead = all(not images[nm] for nm in deg_one)
    comps = {-1: [images[nm] for nm in names if deg[nm] == -1]}
    zero = [images[nm] for nm in names if deg[nm] == 0 and (with_J or not nm.endswith("00"))]
    comps[0] = _homogeneous_basis(vf, zero)
    emb = GradedEmbedding(vf, comps, label=f"phi(q({n + 1}))" + ("" if with_J else " without J"))
    return PhiReport(emb, images, deg, kernel, violations, dead, images["X00"])


def _zero_based(digits: str) -> str:
    """'12' (1-based row/col of the matrix model) -> '01'."""
    if "_" in digits:
        a, b = digits.split("_")
    else:
        a, b = digits[0], digits[1:]
    return f"{int(a) - 1}{int(b) - 1}"


def q_identity_embedding(n: int, ctx: FieldCtx, with_J: bool = False) -> GradedEmbedding:
    """(id, q(n)) realized in vect(n; N_s | n); with_J adds the images of E_00 and X_00."""
    return embed_phi(n, ctx, with_J=with_J).embedding


def phi_image_by_degree(report: PhiReport) -> dict[int, Subspace]:
    vf = report.embedding.ambient
    out: dict[int, list] = {}
    for nm, f in report.images.items():
        out.setdefault(report.degrees[nm], []).append(vf.dense(f))
    return {d: Subspace(vf.ctx, vf.dim, vs) for d, vs in sorted(out.items())}


# -- q(vect(n; N_s | 0)) via the (F, G) pairs ---------------------------------------------------------

def _fg_pair(vf: VectorFields, n: int, subset: Sequence[int]) -> tuple[dict, dict]:
    """F and G for the main part z_S (S a set of z-indices), characteristic 2."""
    dp = vf.dp
    F: dict = {}
    G: dict = {}
    for r in range(len(subset) + 1):
        for T in itertools.combinations(subset, r):
            rest = [k for k in subset if k not in T]
            a = tuple(1 if k in rest else 0 for k in range(n))
            mask = sum(1 << k for k in T)
            idx = dp.index[(a, mask)]
            (F if r % 2 == 0 else G)[idx] = 1
    return F, G


def lift_field(vf: VectorFields, n: int, main: dict[int, set[int] | Sequence[int]], odd: bool) -> Field:
    """Lift sum_k z_{S_k} d_{z_k} (main part) to the even field sum F d_z + G d_xi
    or, if ``odd``, to sum G d_z + F d_xi."""
    ctx = vf.ctx
    out: dict = {}
    for k, subsets in main.items():
        for S in subsets:
            F, G = _fg_pair(vf, n, sorted(S))
            zk, xk = k, n + k
            f_var, g_var = (xk, zk) if odd else (zk, xk)
            for mono, c in F.items():
                idx = vf.basis_index(mono, f_var)
                out[idx] = ctx.add(out.get(idx, 0), c)
            for mono, c in G.items():
                idx = vf.basis_index(mono, g_var)
                out[idx] = ctx.add(out.get(idx, 0), c)
    return {k: c for k, c in out.items() if c}


def q_vect_fields(n: int, ctx: FieldCtx, vf: VectorFields | None = None) -> dict[int, list[Field]]:
    """Degree -> fields spanning q(vect(n; N_s | 0)) inside vect(n; N_s | n), p=2."""
    if ctx.p != 2:
        raise WrongCharacteristic("the (F, G) description is for p=2")
    vf = vf or zxi_ambient(n, ctx)
    out: dict[int, list[Field]] = {}
    for size in range(n + 1):
        for S in itertools.combinations(range(n), size):
            for k in range(n):
                for odd in (False, True):
                    out.setdefault(size - 1, []).append(lift_field(vf, n, {k: [S]}, odd))
    return out


def lift_vect_field(vf: VectorFields, n: int, X_even_only: Field, source: VectorFields, odd: bool) -> Field:
    """Lift a field of vect(n; N_s | 0) (in ``source``) into q(vect) inside ``vf``."""
    ctx = vf.ctx
    acc: dict = {}
    for idx, c in X_even_only.items():
        mono, var = source.split(idx)
        a, _ = source.dp.monomials[mono]
        S = [i for i, e in enumerate(a) if e]
        if any(e > 1 for e in a):
            raise InconsistentEmbedding("only N_s fields can be lifted")
        piece = lift_field(vf, n, {var: [S]}, odd)
        acc = _sparse_add(ctx, acc, piece, c)
    return acc


def main_part(vf: VectorFields, n: int, X: Field) -> Field:
    """Drop xi-dependent monomials: even X -> sum F_i^m d_{z_i}, odd X -> sum F_i^m d_{xi_i}."""
    parity = vf.field_parity(X)
    if parity is None:
        raise NotHomogeneous("main part needs a parity-homogeneous field")
    dp = vf.dp
    out = {}
    for idx, c in X.items():
        mono, var = vf.split(idx)
        if dp.monomials[mono][1]:
            continue
        if parity == 0 and var < n:
            out[idx] = c
        elif parity == 1 and var >= n:
            out[idx] = c
    return out


# -- queerification commutes with prolongation ------------------------------------------------------

@dataclass
class QGVerdict:
    equal: bool
    qg_dims: dict[int, tuple[int, int]]
    gq_dims: dict[int, tuple[int, int]]
    first_mismatch: int | None = None
    module_failures: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.equal


def linear_fields(vf: VectorFields, mats: Sequence[Sequence[Sequence[int]]], n: int) -> list[Field]:
    """Matrix A -> sum_{i,j} A_ij z_j d_{z_i} (the linear action on g_-1 = span d_z)."""
    out = []
    for A in mats:
        terms = []
        for i in range(n):
            for j in range(n):
                if A[i][j]:
                    terms.append((A[i][j], _var(vf, j), i))
        out.append(_field(vf, terms))
    return out


def check_qg_eq_gq(g0: SuperAlgebra, ctx: FieldCtx | None = None) -> QGVerdict:
    """Compare q(prolong(g_-1, g_0)) with prolong(q g_-1, q g_0) inside q(vect(n; N_s | 0)).

    ``g0`` is a matrix Lie algebra (with ``.model``) acting on K^n by its
    defining representation; its 2-structure is the matrix square.
    """
    from .catalog import matrix_square_witness
    from .restrict import ModuleAction, check_restricted_module

    ctx = ctx or g0.ctx
    if ctx.p != 2:
        raise WrongCharacteristic("queerification of prolongs is compared for p=2")
    model = g0.model
    n = model.size
    witness = matrix_square_witness(g0)
    act = ModuleAction(g0, n, [model.mats[i] for i in range(g0.n)])
    verdict = check_restricted_module(g0, witness, act)
    if not verdict.ok:
        raise NotRestricted(f"K^{n} is not a restricted module: {verdict.failures[:1]}")
    # g = (K^n, g0)_* inside vect(n; N_s | 0)
    src = zxi_ambient(n, ctx, n_odd=0)
    minus = [{src.basis_index(src.dp.unit_index(), i): 1} for i in range(n)]
    e = GradedEmbedding(src, {-1: minus, 0: linear_fields(src, model.mats, n)}, label="g")
    g = cartan_prolong(e)
    # qg: lift g and Pi(g) into vect(n; N_s | n)
    vf = zxi_ambient(n, ctx)
    qg: dict[int, list[Field]] = {}
    for d, fields in g.components.items():
        for f in fields:
            qg.setdefault(d, []).append(lift_vect_field(vf, n, f, src, False))
            qg.setdefault(d, []).append(lift_vect_field(vf, n, f, src, True))
    # gq: prolong of the queerified non-positive part
    comps = {d: qg[d] for d in (-1, 0) if d in qg}
    gq = cartan_prolong(GradedEmbedding(vf, comps, label="gq"))
    qg_dims, gq_dims = {}, {}
    mismatch = None
    degrees = sorted(set(qg) | set(gq.components))
    for d in degrees:
        A = Subspace(ctx, vf.dim, [vf.dense(f) for f in qg.get(d, [])])
        B = gq.subspace(d)
        qg_dims[d] = _parity_dims(vf, qg.get(d, []))
        gq_dims[d] = _parity_dims(vf, gq.components.get(d, []))
        if not A == B and mismatch is None:
            mismatch = d
    return QGVerdict(mismatch is None, qg_dims, gq_dims, mismatch)


def _parity_dims(vf: VectorFields, fields) -> tuple[int, int]:
    ctx = vf.ctx
    ev = Subspace(ctx, vf.dim, [vf.dense(f) for f in fields if vf.field_parity(f) == 0]).dim
    od = Subspace(ctx, vf.dim, [vf.dense(f) for f in fields if vf.field_parity(f) == 1]).dim
    return ev, od


def n_sensitivity(e: GradedEmbedding, bump: int = 1) -> tuple[dict, dict]:
    """Prolong dims in the given ambient and in one with every N_i increased by ``bump``."""
    vf = e.ambient
    dp = vf.dp
    bigger = VectorFields(DividedPowerCtx(vf.ctx, dp.m, [x + bump for x in dp.N], dp.n_odd,
                                          even_names=dp.even_names, odd_names=dp.odd_names,
                                          weights=dp.weights, odd_weights=dp.odd_weights))
    comps = {d: [transfer_field(f, vf, bigger) for f in fs] for d, fs in e.components.items()}
    small = cartan_prolong(e).dims()
    large = cartan_prolong(GradedEmbedding(bigger, comps, e.label)).dims()
    return small, large


def transfer_field(X: Field, src: VectorFields, dst: VectorFields) -> Field:
    out = {}
    for idx, c in X.items():
        mono, var = src.split(idx)
        key = src.dp.monomials[mono]
        out[dst.basis_index(dst.dp.index[key], var)] = c
    return out


def matrix_embedding(g0: SuperAlgebra, N: Sequence[int] | None = None) -> GradedEmbedding:
    """(K^n, g0) in vect(n; N | 0) for a matrix Lie algebra g0 acting on K^n."""
    model = getattr(g0, "model", None)
    if model is None:
        raise InconsistentEmbedding("the degree-0 part must be a matrix algebra")
    n = model.size
    vf = zxi_ambient(n, g0.ctx, n_odd=0, N=N)
    minus = [{vf.basis_index(vf.dp.unit_index(), i): 1} for i in range(n)]
    label = str(g0.meta.get("family", "g0"))
    return GradedEmbedding(vf, {-1: minus, 0: linear_fields(vf, model.mats, n)}, label=label)
