"""Superization: queerification, partial queerification and method 2,
plus the inverse procedure that tells which of the two produced a given
simple Lie superalgebra in characteristic 2."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .errors import (
    NotAnIdeal,
    DecompositionFails,
    InvalidWitness,
    NotLieAdmissible,
    NotSimpleInput,
    ParityViolation,
    WrongCharacteristic,
)
from .ffield import FieldCtx
from .linalg import Subspace, kernel_rows, lin_comb, rref_rows
from .matrices import MatrixAlgebra
from .restrict import (
    StructureWitness,
    TwoTwoMap,
    find_p_structure,
    minimal_graded_closure,
    one_step_closure,
    verify_witness,
)
from .superalg import (
    SuperAlgebra,
    algebra_from_constants,
    bracket_span,
    check_axioms,
    is_ideal,
    is_simple,
    odd_squares_span,
    subalgebra,
)

SEARCH_BOUND = 1 << 12
EXHAUSTIVE_DIM = 24


@dataclass
class QueerPair:
    """A queerified algebra together with the index correspondences.

    ``even_index[i]`` is the position of the i-th basis vector of the even
    carrier in ``result``; ``mirror[j]`` is the position of Pi(b_j) for the
    j-th basis vector b_j of ``base``.
    """

    base: SuperAlgebra
    carrier: SuperAlgebra
    result: SuperAlgebra
    even_index: list[int]
    mirror: list[int]


@dataclass
class OriginCertificate:
    verdict: str
    h: SuperAlgebra
    h_even: Subspace
    h_odd: Subspace
    bijections: list[list[list[int]]] = field(default_factory=list)
    grading_used: list[int] = field(default_factory=list)
    search_complete: bool = True
    intertwiner_dim: int = 0

    def to_json(self) -> dict:
        ctx = self.h.ctx
        return {
            "verdict": self.verdict,
            "h_dims": [self.h_even.dim, self.h_odd.dim],
            "bijections": [[[ctx.serialize(c) for c in row] for row in f] for f in self.bijections],
            "grading_used": list(self.grading_used),
            "search_complete": self.search_complete,
            "intertwiner_dim": self.intertwiner_dim,
        }


def _require_char2(ctx: FieldCtx, what: str) -> None:
    if ctx.p != 2:
        raise WrongCharacteristic(f"{what} is defined for p=2")


def _simplicity(g: SuperAlgebra):
    exhaustive = True if (g.ctx.order == 2 and g.n <= EXHAUSTIVE_DIM) else "auto"
    return is_simple(g, exhaustive=exhaustive)


def _require_simple(g: SuperAlgebra, what: str):
    verdict = _simplicity(g)
    if not verdict.simple:
        raise NotSimpleInput(f"{what} needs a simple input ({verdict.method})")
    return verdict


def _record_simplicity(out: SuperAlgebra, check: bool) -> SuperAlgebra:
    if check:
        verdict = _simplicity(out)
        out.simplicity = verdict
        out.meta["simple"] = verdict.simple
        out.meta["simple_method"] = verdict.method
        if not verdict.simple:
            raise DecompositionFails("the superization is not simple, contradicting the simplicity theorem")
    return out


# -- queerification of associative algebras ----------------------------------------------

def matrix_units(n: int, ctx: FieldCtx) -> tuple[list[str], list[list[list[int]]]]:
    """Structure constants of Mat(n) in the basis of matrix units."""
    names = [f"E{i + 1}{j + 1}" if n < 10 else f"E{i + 1}_{j + 1}" for i in range(n) for j in range(n)]
    dim = n * n
    mult = [[[0] * dim for _ in range(dim)] for _ in range(dim)]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                mult[i * n + j][j * n + k][i * n + k] = 1
    return names, mult


def _lie_of(ctx: FieldCtx, names, mult, parity=None) -> SuperAlgebra:
    n = len(names)
    parity = list(parity) if parity is not None else [0] * n
    neg1 = ctx.neg(1)
    entries = []
    for i in range(n):
        for j in range(i, n):
            sign = 1 if (parity[i] and parity[j]) else neg1
            v = lin_comb(ctx, [1, sign], [mult[i][j], mult[j][i]], n)
            if i == j and not any(v):
                continue
            if any(v):
                entries.append((i, j, v))
    return algebra_from_constants(ctx, names, parity, entries, check_grading=False)


def queerify_assoc(ctx: FieldCtx, names: Sequence[str], mult) -> SuperAlgebra:
    """q(A) for an algebra A with product ``mult[i][j]`` (coordinate vectors).

    Brackets: [x, y] = xy - yx, [x, Pi y] = Pi(xy - yx), [Pi x, Pi y] = xy + yx;
    for p=2 the odd-odd data is the squaring (Pi x)^2 = x^2.
    """
    n = len(names)
    try:
        lie = _lie_of(ctx, names, mult)
    except ParityViolation as exc:  # pragma: no cover - parities are all even
        raise NotLieAdmissible(str(exc)) from exc
    except Exception as exc:
        raise NotLieAdmissible(f"commutator algebra is not a Lie algebra: {exc}") from exc
    if not check_axioms(lie, stop_after=1).ok:
        raise NotLieAdmissible("the commutator algebra fails the Jacobi identity")
    neg1 = ctx.neg(1)

    def shift(v):
        out = [0] * (2 * n)
        out[n:] = v
        return out

    def pad(v):
        return list(v) + [0] * n

    entries = []
    for i in range(n):
        for j in range(n):
            comm = lin_comb(ctx, [1, neg1], [mult[i][j], mult[j][i]], n)
            if j >= i and any(comm):
                entries.append((i, j, pad(comm)))
            if any(comm):
                entries.append((i, n + j, shift(comm)))
            if j >= i and ctx.p != 2:
                anti = lin_comb(ctx, [1, 1], [mult[i][j], mult[j][i]], n)
                if any(anti):
                    entries.append((n + i, n + j, pad(anti)))
    squares = None
    if ctx.p == 2:
        squares = {n + i: pad(mult[i][i]) for i in range(n)}
        for i in range(n):
            for j in range(i + 1, n):
                anti = lin_comb(ctx, [1, 1], [mult[i][j], mult[j][i]], n)
                if any(anti):
                    entries.append((n + i, n + j, pad(anti)))
    all_names = list(names) + [f"Pi({x})" for x in names]
    out = algebra_from_constants(ctx, all_names, [0] * n + [1] * n, entries, squares,
                                 meta={"construction": "q(assoc)"})
    out.queer_pair = QueerPair(lie, lie, out, list(range(n)), list(range(n, 2 * n)))
    return out


# -- queerification of restricted Lie algebras ---------------------------------------------

def _queer_from(carrier: SuperAlgebra, base: SuperAlgebra, act, squares, base_in_carrier, meta) -> SuperAlgebra:
    """carrier (+) Pi(base): carrier acts on base by ``act(a)`` (matrix on base
    coordinates), [Pi x, Pi y] = [x, y] placed via ``base_in_carrier`` and
    (Pi b_j)^2 = squares[j] (carrier coordinates)."""
    ctx = carrier.ctx
    m, n = carrier.n, base.n
    entries = []
    for (i, j), sv in carrier.table.items():
        if i <= j:
            v = [0] * (m + n)
            for k, c in sv:
                v[k] = c
            entries.append((i, j, v))
    for a in range(m):
        mat = act(a)
        for j in range(n):
            col = [mat[k][j] for k in range(n)]
            if any(col):
                entries.append((a, m + j, [0] * m + col))
    for i in range(n):
        for j in range(i + 1, n):
            b = base.bracket_basis(i, j)
            if any(b):
                entries.append((m + i, m + j, base_in_carrier(b) + [0] * n))
    sq = {m + j: list(squares[j]) + [0] * n for j in range(n)}
    names = list(carrier.names) + [f"Pi({x})" for x in base.names]
    grading = None
    if carrier.grading is not None and base.grading is not None:
        grading = list(carrier.grading) + list(base.grading)
    out = algebra_from_constants(ctx, names, list(carrier.parity) + [1] * n, entries, sq, grading, meta)
    out.queer_pair = QueerPair(base, carrier, out, list(range(m)), list(range(m, m + n)))
    return out


def queerify_restricted(g: SuperAlgebra, witness: StructureWitness | None = None,
                        check_simple: bool = False) -> SuperAlgebra:
    """q(g) = g (+) Pi(g): [x, Pi y] = Pi [x, y], (Pi x)^2 = x^[2]."""
    _require_char2(g.ctx, "queerification of a restricted Lie algebra")
    if g.dim_odd:
        raise ParityViolation("input must be a Lie algebra (no odd part)")
    if witness is None:
        witness = _matrix_witness(g) or find_p_structure(g)
        if witness is None:
            raise InvalidWitness("the algebra has no 2-structure")
    bad = verify_witness(g, witness)
    if bad:
        raise InvalidWitness(f"witness fails on {bad[0][:2]}")
    n = g.n
    squares = [witness.low[i] for i in range(n)]
    out = _queer_from(g, g, lambda a: g.ad_basis(a), squares, list,
                      {"construction": "q", "base": g.meta.get("family", "g")})
    out.witness_used = witness
    return _record_simplicity(out, check_simple)


def _matrix_witness(g: SuperAlgebra) -> StructureWitness | None:
    """Matrix squaring when g is a matrix algebra closed under it.

    With a center the 2-structure is not unique; matrix squaring is the
    natural choice and matches (0, B)^2 = (B^2, 0) for queer matrix families.
    """
    if getattr(g, "model", None) is None:
        return None
    from .catalog import matrix_square_witness

    try:
        return matrix_square_witness(g)
    except NotAnIdeal:
        return None


def partial_queerify(g: SuperAlgebra, check_simple: bool = True) -> SuperAlgebra:
    """tilde q(g) = g^<1> (+) Pi(g) for a simple Lie algebra g (p=2).

    g^<1> is spanned in gl(g) by ad(g) and the squares (ad x)^2; the squaring
    (Pi x)^2 := (ad x)^2 is taken inside it.
    """
    _require_char2(g.ctx, "partial queerification")
    if g.dim_odd:
        raise ParityViolation("input must be a Lie algebra (no odd part)")
    _require_simple(g, "partial queerification")
    cl = one_step_closure(g)
    carrier = cl.algebra
    n = g.n
    from .linalg import mat_mul

    squares = []
    for i in range(n):
        sq = mat_mul(g.ctx, g.ad_basis(i), g.ad_basis(i), n)
        squares.append(cl.model.coords(sq))
    out = _queer_from(carrier, g, lambda a: cl.matrices[a], squares,
                      lambda b: list(b) + [0] * (carrier.n - n),
                      {"construction": "tilde-q", "base": g.meta.get("family", "g")})
    out.closure = cl
    return _record_simplicity(out, check_simple)


# -- method 2 ------------------------------------------------------------------------------------

def method2(g: SuperAlgebra, split: Sequence[int], check_simple: bool = True) -> SuperAlgebra:
    """S(g, gr): the 1-tagged part of ``split`` becomes odd, with x^2 := x^[2].

    The space is the smallest subalgebra of the restricted closure that
    contains g and the squares of the 1-tagged part.
    """
    _require_char2(g.ctx, "method 2")
    if g.dim_odd:
        raise ParityViolation("input must be a Lie algebra (no odd part)")
    _require_simple(g, "method 2")
    cl = minimal_graded_closure(g, split)
    parity = list(cl.tags)
    model = MatrixAlgebra(g.ctx, cl.matrices, cl.model.names, parity, grading=cl.degrees,
                          meta={"construction": "method2", "base": g.meta.get("family", "g")})
    out = model.algebra
    out.model = model
    out.closure = cl
    out.split_used = tuple(split)
    return _record_simplicity(out, check_simple)


def desuperize(g: SuperAlgebra, witness: StructureWitness | None = None) -> SuperAlgebra:
    """F(g): forget the parity and the squaring.

    With a 2|4-witness for g the returned algebra carries ``.witness``, the
    2-structure e + f -> e^[2] + f^2 + [e, f] read off on basis vectors.
    """
    _require_char2(g.ctx, "desuperization")
    entries = []
    for (i, j), sv in g.table.items():
        if i < j:
            v = g.zero()
            for k, c in sv:
                v[k] = c
            entries.append((i, j, v))
    out = algebra_from_constants(g.ctx, g.names, [0] * g.n, entries,
                                 grading=g.grading, meta={**g.meta, "construction": "F"},
                                 check_grading=False)
    if witness is not None:
        two = TwoTwoMap(g, witness)
        low = {i: two(g.basis(i)) for i in range(g.n)}
        out.witness = StructureWitness("p", low)
    out.parity_before = list(g.parity)
    return out


# -- which construction produced a simple superalgebra? ---------------------------------------------

def _restricted_action(g: SuperAlgebra, y: Sequence[int], space: Subspace) -> list[list[int]]:
    """Matrix of ad y on ``space`` in its RREF coordinates (columns = images)."""
    cols = []
    for b in space.basis:
        w = g.bracket(y, b)
        c = space.coordinates(w)
        if c is None:
            raise DecompositionFails("subspace is not invariant")
        cols.append(c)
    d = space.dim
    return [[cols[j][i] for j in range(d)] for i in range(d)]


def _intertwiners(g: SuperAlgebra, h_ev: Subspace, h_od: Subspace) -> list[list[int]]:
    """Basis of {F : h_od-coords x h_ev-coords | F rho_ev(y) = rho_od(y) F for y in h_ev}."""
    ctx = g.ctx
    de, do = h_ev.dim, h_od.dim
    rows = []
    neg1 = ctx.neg(1)
    for y in h_ev.basis:
        r_ev = _restricted_action(g, y, h_ev)
        r_od = _restricted_action(g, y, h_od)
        # unknown F[a][b] at position a*de + b
        for a in range(do):
            for b in range(de):
                row = [0] * (do * de)
                for k in range(de):
                    if r_ev[k][b]:
                        row[a * de + k] = ctx.add(row[a * de + k], r_ev[k][b])
                for k in range(do):
                    if r_od[a][k]:
                        row[k * de + b] = ctx.add(row[k * de + b], ctx.mul(neg1, r_od[a][k]))
                if any(row):
                    rows.append(row)
    return kernel_rows(ctx, rows, do * de)


def classify_origin(g: SuperAlgebra, check_simple: bool = True,
                    bound: int = SEARCH_BOUND) -> OriginCertificate:
    """Decide whether g is a (partial) queerification or comes from method 2.

    h = [g_od, g_od] (+) g_od inside F(g); a bijection f : h_ev -> h_od with
    [y, f(x)] = f([y, x]) and [f(y), f(x)] = [y, x] means g = tilde q(h_ev).
    """
    _require_char2(g.ctx, "classification of origin")
    if check_simple:
        _require_simple(g, "classification of origin")
    ctx = g.ctx
    n = g.n
    odd = Subspace(ctx, n, [g.basis(i) for i in g.odd])
    even = Subspace(ctx, n, [g.basis(i) for i in g.even])
    brackets = bracket_span(g, odd, odd)
    squares = odd_squares_span(g, odd)
    if not (brackets + squares) == even:
        raise DecompositionFails("even part is not [g_od, g_od] + span of odd squares")
    lemma_ideal = brackets + squares + odd
    if not is_ideal(g, lemma_ideal):
        raise DecompositionFails("([g_od, g_od] + S) + g_od is not an ideal")
    F = desuperize(g)
    h_space = brackets + odd
    h = subalgebra(F, h_space)
    cert = OriginCertificate("method-2", h, brackets, odd,
                             grading_used=[g.parity[i] for i in range(n)])
    if brackets.dim != odd.dim:
        return cert
    basis = _intertwiners(g, brackets, odd)
    cert.intertwiner_dim = len(basis)
    if not basis:
        return cert
    found = []
    total = ctx.order ** len(basis)
    cert.search_complete = total - 1 <= bound
    count = 0
    d = brackets.dim
    for coeffs in itertools.product(range(ctx.order), repeat=len(basis)):
        if not any(coeffs):
            continue
        count += 1
        if count > bound:
            break
        flatF = lin_comb(ctx, list(coeffs), basis, d * d)
        Fm = [flatF[a * d:(a + 1) * d] for a in range(d)]
        if len(rref_rows(ctx, Fm, d)[1]) != d:
            continue
        if _bilinear_ok(g, brackets, odd, Fm):
            found.append(Fm)
    if found:
        cert.verdict = "partial-queerification"
        cert.bijections = found
    return cert


def _bilinear_ok(g: SuperAlgebra, h_ev: Subspace, h_od: Subspace, Fm) -> bool:
    ctx = g.ctx
    d = h_ev.dim

    def f(v_coords):
        w = [0] * d
        for a in range(d):
            s = 0
            for b in range(d):
                if Fm[a][b] and v_coords[b]:
                    s = ctx.add(s, ctx.mul(Fm[a][b], v_coords[b]))
            w[a] = s
        return lin_comb(ctx, w, h_od.basis, g.n)

    images = [f([1 if k == j else 0 for k in range(d)]) for j in range(d)]
    for i in range(d):
        for j in range(i, d):
            lhs = g.bracket(images[i], images[j])
            rhs = g.bracket(h_ev.basis[i], h_ev.basis[j])
            if lhs != rhs:
                return False
    return True


def block_split(g: SuperAlgebra, blocks: Sequence[int]) -> list[int]:
    """Tags for a matrix algebra with basis E_ij / H_i: E_ij gets blocks[i] + blocks[j] mod 2."""
    model = getattr(g, "model", None)
    tags = []
    for idx, name in enumerate(g.names):
        if model is not None:
            m = model.matrix(g.basis(idx))
            ts = {(blocks[r] + blocks[c]) % 2 for r, row in enumerate(m) for c, x in enumerate(row) if x}
            if len(ts) != 1:
                raise ParityViolation(f"basis vector {name} is not homogeneous for the block split")
            tags.append(ts.pop())
        elif name.startswith("E"):
            digits = name[1:].split("_") if "_" in name else list(name[1:])
            i, j = int(digits[0]) - 1, int(digits[1]) - 1
            tags.append((blocks[i] + blocks[j]) % 2)
        else:
            tags.append(0)
    return tags
