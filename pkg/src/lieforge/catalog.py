"""Constructors for concrete algebra families and the algebra file format."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Callable, Sequence

from .errors import AxiomFailure, BadParams, BadSplit, NotAnIdeal, NotVectorial, ParseError
from .ffield import FieldCtx, ff_make, field_from_spec
from .linalg import Subspace, kernel_rows
from .matrices import MatrixAlgebra, elementary, identity, trace, zeros
from .superalg import (
    SuperAlgebra,
    algebra_from_constants,
    center,
    check_axioms,
    derived,
    quotient,
    subalgebra,
)
from .vectorial import DividedPowerCtx, VectorFields

FORMAT = "lieforge-algebra/1"


def _label(i: int, j: int, n: int) -> str:
    return f"{i + 1}{j + 1}" if n < 10 else f"{i + 1}_{j + 1}"


def _attach(model: MatrixAlgebra, family: str, params: dict) -> SuperAlgebra:
    g = model.algebra
    g.model = model
    g.meta.update({"family": family, **{k: v for k, v in params.items()}})
    return g


# -- matrix Lie algebras -------------------------------------------------------------

def gl(n: int, ctx: FieldCtx) -> SuperAlgebra:
    mats, names = [], []
    for i in range(n):
        for j in range(n):
            mats.append(elementary(n, i, j))
            names.append(f"E{_label(i, j, n)}")
    return _attach(MatrixAlgebra(ctx, mats, names), "gl", {"n": n})


def _sl_basis(n: int, ctx: FieldCtx):
    mats, names = [], []
    for i in range(n):
        for j in range(n):
            if i != j:
                mats.append(elementary(n, i, j))
                names.append(f"E{_label(i, j, n)}")
    for i in range(n - 1):
        h = elementary(n, i, i)
        h[i + 1][i + 1] = ctx.neg(1)
        mats.append(h)
        names.append(f"H{i + 1}")
    return mats, names


def sl(n: int, ctx: FieldCtx) -> SuperAlgebra:
    if n < 2:
        raise BadParams("sl(n) needs n >= 2")
    mats, names = _sl_basis(n, ctx)
    return _attach(MatrixAlgebra(ctx, mats, names), "sl", {"n": n})


def psl(n: int, ctx: FieldCtx) -> SuperAlgebra:
    g = sl(n, ctx)
    z = center(g)
    if not z.dim:
        g.meta["family"] = "psl"
        return g
    q, _ = quotient(g, z)
    q.meta.update({"family": "psl", "n": n})
    return q


def _sym(n: int, i: int, j: int) -> list[list[int]]:
    m = elementary(n, i, j)
    m[j][i] = 1
    return m


def o_form(n: int, form: Sequence[Sequence[int]], ctx: FieldCtx, family: str = "o") -> SuperAlgebra:
    """{X : X B + B X^T = 0} for a Gram matrix B."""
    rows = []
    for r in range(n):
        for c in range(n):
            # entry (r, c) of XB + BX^T as a linear form in the entries of X
            row = [0] * (n * n)
            for k in range(n):
                if form[k][c]:
                    row[r * n + k] = ctx.add(row[r * n + k], form[k][c])
                if form[r][k]:
                    row[c * n + k] = ctx.add(row[c * n + k], form[r][k])
            rows.append(row)
    basis = kernel_rows(ctx, rows, n * n)
    mats = [[b[r * n:(r + 1) * n] for r in range(n)] for b in basis]
    names = [f"X{t}" for t in range(len(mats))]
    return _attach(MatrixAlgebra(ctx, mats, names), family, {"n": n})


def o_I(n: int, ctx: FieldCtx) -> SuperAlgebra:
    """Orthogonal algebra of the identity form; for p=2 all symmetric matrices."""
    if ctx.p != 2:
        return o_form(n, identity(n), ctx, "o_I")
    mats, names = [], []
    for i in range(n):
        mats.append(elementary(n, i, i))
        names.append(f"S{_label(i, i, n)}")
    for i in range(n):
        for j in range(i + 1, n):
            mats.append(_sym(n, i, j))
            names.append(f"S{_label(i, j, n)}")
    return _attach(MatrixAlgebra(ctx, mats, names), "o_I", {"n": n})


def o_I_sl(n: int, ctx: FieldCtx) -> SuperAlgebra:
    """Traceless symmetric matrices, o_I(n) intersected with sl(n) (characteristic 2)."""
    if ctx.p != 2:
        raise BadParams("this model of o_I(n) is for characteristic 2")
    mats, names = [], []
    for i in range(n - 1):
        h = elementary(n, i, i)
        h[i + 1][i + 1] = 1
        mats.append(h)
        names.append(f"H{i + 1}")
    for i in range(n):
        for j in range(i + 1, n):
            mats.append(_sym(n, i, j))
            names.append(f"S{_label(i, j, n)}")
    return _attach(MatrixAlgebra(ctx, mats, names), "o_I_sl", {"n": n})


def zd(n: int, ctx: FieldCtx) -> SuperAlgebra:
    """Symmetric matrices with zero diagonal (characteristic 2)."""
    if ctx.p != 2:
        raise BadParams("ZD(n) is a characteristic-2 family")
    mats, names = [], []
    for i in range(n):
        for j in range(i + 1, n):
            mats.append(_sym(n, i, j))
            names.append(f"S{_label(i, j, n)}")
    return _attach(MatrixAlgebra(ctx, mats, names), "ZD", {"n": n})


def pi_form(k: int) -> list[list[int]]:
    f = zeros(2 * k)
    for i in range(k):
        f[i][k + i] = 1
        f[k + i][i] = 1
    return f


def o_Pi(n: int, ctx: FieldCtx) -> SuperAlgebra:
    """[[A, C], [D, A^T]] with C, D symmetric (characteristic 2)."""
    if n % 2:
        raise BadParams("o_Pi(n) needs even n")
    k = n // 2
    if ctx.p != 2:
        f = pi_form(k)
        for i in range(k):
            f[k + i][i] = ctx.neg(1)
        return o_form(n, f, ctx, "o_Pi")
    mats, names = [], []
    for i in range(k):
        for j in range(k):
            m = zeros(n)
            m[i][j] = 1
            m[k + j][k + i] = 1
            mats.append(m)
            names.append(f"A{_label(i, j, k)}")
    for block, tag in ((0, "C"), (1, "D")):
        for i in range(k):
            for j in range(i, k):
                m = zeros(n)
                r0, c0 = (0, k) if block == 0 else (k, 0)
                m[r0 + i][c0 + j] = 1
                m[r0 + j][c0 + i] = 1
                mats.append(m)
                names.append(f"{tag}{_label(i, j, k)}")
    return _attach(MatrixAlgebra(ctx, mats, names), "o_Pi", {"n": n})


def o1_odd_model(n: int, ctx: FieldCtx) -> SuperAlgebra:
    """Matrices [[A, X, B], [Y^T, 0, X^T], [C, Y, A^T]], B, C in ZD(n).

    Carries the Z-grading with weights +1, 0, -1 on the three blocks; its
    reduction mod 2 puts X, Y in the 1-tagged part.
    """
    if ctx.p != 2:
        raise BadParams("this matrix model is for characteristic 2")
    size = 2 * n + 1
    mid = n
    low = n + 1
    weight = [1] * n + [0] + [-1] * n
    mats, names = [], []
    for i in range(n):
        for j in range(n):
            m = zeros(size)
            m[i][j] = 1
            m[low + j][low + i] = 1
            mats.append(m)
            names.append(f"A{_label(i, j, n)}")
    for i in range(n):
        for j in range(i + 1, n):
            b = zeros(size)
            b[i][low + j] = b[j][low + i] = 1
            mats.append(b)
            names.append(f"B{_label(i, j, n)}")
            c = zeros(size)
            c[low + i][j] = c[low + j][i] = 1
            mats.append(c)
            names.append(f"C{_label(i, j, n)}")
    for i in range(n):
        x = zeros(size)
        x[i][mid] = 1
        x[mid][low + i] = 1
        mats.append(x)
        names.append(f"X{i + 1}")
        y = zeros(size)
        y[mid][i] = 1
        y[low + i][mid] = 1
        mats.append(y)
        names.append(f"Y{i + 1}")
    grading = [_matrix_weight(m, weight) for m in mats]
    return _attach(MatrixAlgebra(ctx, mats, names, grading=grading), "o1_odd", {"n": n})


def _matrix_weight(m, weight) -> int:
    degs = {weight[r] - weight[c] for r, row in enumerate(m) for c, x in enumerate(row) if x}
    if len(degs) != 1:
        raise BadParams("basis matrix is not homogeneous")
    return degs.pop()


# -- queer matrix superalgebras --------------------------------------------------------

def _queer_block(ctx: FieldCtx, a, b):
    n = len(a) if a is not None else len(b)
    m = zeros(2 * n)
    for i in range(n):
        for j in range(n):
            if a is not None and a[i][j]:
                m[i][j] = m[n + i][n + j] = a[i][j]
            if b is not None and b[i][j]:
                m[i][n + j] = m[n + i][j] = b[i][j]
    return m


def _queer(family: str, n: int, ctx: FieldCtx, even_mats, even_names, odd_mats, odd_names) -> SuperAlgebra:
    mats = [_queer_block(ctx, a, None) for a in even_mats] + [_queer_block(ctx, None, b) for b in odd_mats]
    names = list(even_names) + [f"Pi({x})" for x in odd_names]
    parity = [0] * len(even_mats) + [1] * len(odd_mats)
    return _attach(MatrixAlgebra(ctx, mats, names, parity), family, {"n": n})


def q(n: int, ctx: FieldCtx) -> SuperAlgebra:
    """q(n): pairs (A, B) as [[A, B], [B, A]] with B odd."""
    g = gl(n, ctx)
    mats = g.model.mats
    return _queer("q", n, ctx, mats, g.names, mats, g.names)


def sq(n: int, ctx: FieldCtx) -> SuperAlgebra:
    """Queer-traceless part of q(n)."""
    g = gl(n, ctx)
    smats, snames = _sl_basis(n, ctx)
    return _queer("sq", n, ctx, g.model.mats, g.names, smats, snames)


def psq(n: int, ctx: FieldCtx) -> SuperAlgebra:
    g = sq(n, ctx)
    one = g.model.coords(_queer_block(ctx, identity(n), None))
    out, _ = quotient(g, Subspace(ctx, g.n, [one]))
    out.meta.update({"family": "psq", "n": n})
    return out


def s_e_sq(n: int, ctx: FieldCtx) -> SuperAlgebra:
    """Elements of sq(n) with zero even-trace (characteristic 2)."""
    if ctx.p != 2:
        raise BadParams("the even-trace is a characteristic-2 notion")
    smats, snames = _sl_basis(n, ctx)
    return _queer("s_e_sq", n, ctx, smats, snames, smats, snames)


def ii_ideal(g: SuperAlgebra) -> Subspace:
    """span{(1, 0), (0, 1)} inside a queer family built on n x n blocks."""
    n = g.meta["n"]
    ctx = g.ctx
    vecs = [g.model.coords(_queer_block(ctx, identity(n), None)),
            g.model.coords(_queer_block(ctx, None, identity(n)))]
    return Subspace(ctx, g.n, vecs)


def ps_e_psq(n: int, ctx: FieldCtx) -> SuperAlgebra:
    if n % 2:
        raise BadParams("ps_e_psq(n) is defined for even n")
    g = s_e_sq(n, ctx)
    out, _ = quotient(g, ii_ideal(g))
    out.meta.update({"family": "ps_e_psq", "n": n})
    return out


def queer_blocks(g: SuperAlgebra, v: Sequence[int]):
    """(A, B) blocks of an element of a queer matrix family."""
    m = g.model.matrix(v)
    n = len(m) // 2
    a = [row[:n] for row in m[:n]]
    b = [row[n:] for row in m[:n]]
    return a, b


def qtr(g: SuperAlgebra, v: Sequence[int]) -> int:
    """Queer trace (A, B) -> tr B."""
    return trace(g.ctx, queer_blocks(g, v)[1])


def etr(g: SuperAlgebra, v: Sequence[int]) -> int:
    """Even-trace (A, B) -> tr A."""
    return trace(g.ctx, queer_blocks(g, v)[0])


def matrix_trace(g: SuperAlgebra, v: Sequence[int]) -> int:
    return trace(g.ctx, g.model.matrix(v))


def matrix_square_witness(g: SuperAlgebra):
    """The [p]-map X -> X^p of a matrix Lie algebra closed under p-th powers."""
    from .linalg import mat_pow_rows
    from .restrict import StructureWitness

    ctx = g.ctx
    low = {}
    for i in range(g.n):
        if g.parity[i]:
            continue
        low[i] = g.model.coords(mat_pow_rows(ctx, g.model.mats[i], ctx.p))
    return StructureWitness("p" if not g.dim_odd else "p|2p", low, exponent_low=ctx.p, exponent_high=2 * ctx.p)


# -- orthosymplectic superalgebras (characteristic 2) ------------------------------------

def oo_form(even_form, odd_form, ctx: FieldCtx, even_weights=None, odd_weights=None) -> SuperAlgebra:
    """Supermatrices X with XB symmetric, B = even_form (+) odd_form (p=2)."""
    if ctx.p != 2:
        raise BadParams("this orthosymplectic model is for characteristic 2")
    a, b = len(even_form), len(odd_form)
    size = a + b
    form = zeros(size)
    for i in range(a):
        for j in range(a):
            form[i][j] = even_form[i][j]
    for i in range(b):
        for j in range(b):
            form[a + i][a + j] = odd_form[i][j]
    par = [0] * a + [1] * b
    weights = None
    if even_weights is not None:
        weights = list(even_weights) + list(odd_weights or [0] * b)
    mats, names, parity = [], [], []
    for target in (0, 1):
        cells = [(r, c) for r in range(size) for c in range(size) if (par[r] + par[c]) % 2 == target]
        pos = {rc: t for t, rc in enumerate(cells)}
        rows = []
        for r in range(size):
            for c in range(r, size):
                # (XB)[r][c] - (XB)[c][r] = sum_k X[r][k] B[k][c] - X[c][k] B[k][r]
                row = [0] * len(cells)
                for k in range(size):
                    if form[k][c] and (r, k) in pos:
                        row[pos[(r, k)]] ^= 1
                    if form[k][r] and (c, k) in pos:
                        row[pos[(c, k)]] ^= 1
                rows.append(row)
        for vec in kernel_rows(ctx, rows, len(cells)):
            m = zeros(size)
            for t, x in enumerate(vec):
                if x:
                    r, c = cells[t]
                    m[r][c] = x
            mats.append(m)
            names.append(f"{'Y' if target else 'X'}{len(names)}")
            parity.append(target)
    grading = [_matrix_weight(m, weights) for m in mats] if weights is not None else None
    return _attach(MatrixAlgebra(ctx, mats, names, parity, grading=grading), "oo", {"a": a, "b": b})


def oo_IPi(a: int, b2: int, ctx: FieldCtx, derived_part: bool = True) -> SuperAlgebra:
    """oo_{I Pi}(a | b2) and (by default) its first derived superalgebra."""
    if b2 % 2:
        raise BadParams("the odd dimension must be even")
    g = oo_form(identity(a), pi_form(b2 // 2), ctx)
    if not derived_part:
        return g
    out = subalgebra(g, derived(g, 1))
    out.meta.update({"family": "oo1_IPi", "a": a, "b": b2})
    return out


def oo_JPi_graded(n: int, b2: int, ctx: FieldCtx) -> SuperAlgebra:
    """oo^{(1)} for the form J (+) Pi, J = antidiagonal blocks (n, 1, n).

    J is equivalent to the identity form in odd dimension over a perfect
    field of characteristic 2; this model carries the Z-grading with
    weights +1, 0, -1 on the blocks of J and 0 on the odd space.
    """
    size = 2 * n + 1
    j = zeros(size)
    for i in range(n):
        j[i][n + 1 + i] = j[n + 1 + i][i] = 1
    j[n][n] = 1
    g = oo_form(j, pi_form(b2 // 2), ctx, [1] * n + [0] + [-1] * n, [0] * b2)
    out = subalgebra(g, derived(g, 1))
    out.meta.update({"family": "oo1_JPi", "a": size, "b": b2})
    return out


def oo1_IPi_1_2(ctx: FieldCtx | None = None) -> SuperAlgebra:
    """The 3|2-dimensional superalgebra with basis X_-^2, X_-, H, X_+, X_+^2.

    Stated relations: [H, X_pm] = X_pm, [X_+, X_-] = [X_+^2, X_-^2] = H and
    squares (X_pm)^2 = X_pm^2.  The squaring axiom forces the remaining
    brackets [X_+^2, X_-] = X_+ and [X_-^2, X_+] = X_-.
    """
    ctx = ctx or ff_make(2)
    if ctx.p != 2:
        raise BadParams("this superalgebra is defined in characteristic 2")
    names = ["Xm^2", "Xm", "H", "Xp", "Xp^2"]
    parity = [0, 1, 0, 1, 0]
    brackets = [(2, 1, {1: 1}), (2, 3, {3: 1}), (3, 1, {2: 1}), (4, 0, {2: 1}),
                (4, 1, {3: 1}), (0, 3, {1: 1})]
    squares = {1: {0: 1}, 3: {4: 1}}
    return algebra_from_constants(ctx, names, parity, brackets, squares,
                                  meta={"family": "oo1_IPi_1_2"})


# -- vectorial algebras --------------------------------------------------------------------

def vect(m: int, N: Sequence[int], n_odd: int, ctx: FieldCtx, **kw) -> SuperAlgebra:
    dp = DividedPowerCtx(ctx, m, N, n_odd, **kw)
    g = VectorFields(dp).algebra(meta={"family": "vect", "m": m, "N": list(dp.N), "n_odd": n_odd})
    return g


def _homogeneous_kernel(vf: VectorFields, linear_map: Callable[[dict], dict], target_dim: int):
    """Kernel of a degree- and parity-preserving map, basis homogeneous."""
    blocks: dict[tuple[int, int], list[int]] = {}
    for i in range(vf.dim):
        blocks.setdefault((vf.degree(i), vf.parity(i)), []).append(i)
    fields = []
    for key in sorted(blocks):
        idx = blocks[key]
        cols = [linear_map({i: 1}) for i in idx]
        rows = [[c.get(r, 0) for c in cols] for r in range(target_dim)]
        for vec in kernel_rows(vf.ctx, rows, len(idx)):
            fields.append({idx[t]: x for t, x in enumerate(vec) if x})
    return fields


def svect(m: int, N: Sequence[int], n_odd: int, ctx: FieldCtx, **kw) -> SuperAlgebra:
    """Divergence-free vector fields."""
    dp = DividedPowerCtx(ctx, m, N, n_odd, **kw)
    vf = VectorFields(dp)
    fields = _homogeneous_kernel(vf, vf.divergence, dp.dim)
    return vf.algebra(fields, meta={"family": "svect", "m": m, "N": list(dp.N), "n_odd": n_odd})


def _form_matrix(form: str, m: int, ctx: FieldCtx) -> list[list[int]]:
    if form == "I":
        return identity(m)
    if form in ("Pi", "I_pqx"):
        k = m // 2
        if form == "Pi" and m % 2:
            raise BadParams("the symplectic form needs an even number of indeterminates")
        if form == "I_pqx" and m % 2 == 0:
            raise BadParams("the (p, q, x) model of the identity form needs an odd number of indeterminates")
        f = zeros(m)
        for i in range(k):
            f[i][k + i] = 1
            f[k + i][i] = ctx.neg(1)
        if form == "I_pqx":
            f[m - 1][m - 1] = 1
        return f
    raise BadParams(f"unknown form {form!r}")


def hamiltonian_field(vf: VectorFields, form, f: int) -> dict:
    """H_f = sum_{i,j} B_ij d_i(f) d_j for a monomial index f."""
    ctx = vf.ctx
    dp = vf.dp
    out: dict[int, int] = {}
    for i in range(dp.nvars):
        r = dp.mono_deriv(i, f)
        if not r:
            continue
        k, c = r
        for j in range(dp.nvars):
            if form[i][j]:
                idx = vf.basis_index(k, j)
                out[idx] = ctx.add(out.get(idx, 0), ctx.mul(c, form[i][j]))
    return {k: c for k, c in out.items() if c}


def _independent(vf: VectorFields, fields: list[dict]) -> list[dict]:
    from .linalg import Echelon

    ech = Echelon(vf.ctx, vf.dim)
    out = []
    for f in fields:
        if f and ech.add(vf.dense(f)) is not None:
            out.append(f)
    return out


def h_B(m: int, N: Sequence[int], ctx: FieldCtx, form: str = "I", weights=None) -> SuperAlgebra:
    """Hamiltonian fields H_f for the Gram matrix of ``form``.

    Forms: "I" (identity), "Pi" (symplectic pairing of p_i with q_i),
    "I_pqx" (pairs p_i, q_i plus x paired with itself, an odd-dimensional
    model of the identity form).
    """
    if ctx.p != 2 and form != "Pi":
        raise BadParams("forms other than Pi need characteristic 2")
    if form in ("Pi", "I_pqx"):
        k = m // 2
        names = [f"p{i + 1}" for i in range(k)] + [f"q{i + 1}" for i in range(k)]
        if form == "I_pqx":
            names.append("x")
    else:
        names = None
    dp = DividedPowerCtx(ctx, m, N, 0, even_names=names, weights=weights)
    vf = VectorFields(dp)
    B = _form_matrix(form, m, ctx)
    unit = dp.unit_index()
    fields = [hamiltonian_field(vf, B, f) for f in range(dp.dim) if f != unit]
    fields = _independent(vf, fields)
    g = vf.algebra(fields, meta={"family": "h", "form": form, "m": m, "N": list(dp.N)})
    return g


def variable_split(g: SuperAlgebra, tags: Sequence[int]) -> list[int]:
    """Z/2 tags of the basis fields of a vectorial algebra from tags of its
    indeterminates: x^(a) d_j gets sum a_i tags_i - tags_j mod 2."""
    vf = getattr(g, "vector_fields", None)
    if vf is None:
        raise NotVectorial("algebra was not built from vector fields")
    dp = vf.dp
    if len(tags) != dp.nvars:
        raise BadParams(f"need {dp.nvars} variable tags, got {len(tags)}")
    out = []
    for X in g.fields:
        seen = set()
        for idx in X:
            mono, var = vf.split(idx)
            a, b = dp.monomials[mono]
            t = sum(e * tags[k] for k, e in enumerate(a))
            t += sum(tags[dp.m + k] for k in range(dp.n_odd) if (b >> k) & 1)
            seen.add((t - tags[var]) % 2)
        if len(seen) != 1:
            raise BadSplit("field is not homogeneous for the variable tags")
        out.append(seen.pop())
    return out


def contact_field(vf: VectorFields, f: int, pairs: int) -> dict:
    """K_f = (2 - E)(f) d_t - H_f + d_t(f) E with t the first indeterminate.

    E = sum y d_y over the other indeterminates; H_f pairs p_i with q_i and
    each odd indeterminate with itself.
    """
    ctx = vf.ctx
    dp = vf.dp
    out: dict[int, int] = {}

    def add(idx, c):
        if c:
            out[idx] = ctx.add(out.get(idx, 0), c)

    others = [j for j in range(dp.nvars) if j != 0]
    # (2 - E)(f) d_t
    a, b = dp.monomials[f]
    euler = sum(a[1:]) + bin(b).count("1")
    add(vf.basis_index(f, 0), ctx.from_int(2 - euler))
    # -H_f
    neg = ctx.neg
    for i in others:
        r = dp.mono_deriv(i, f)
        if not r:
            continue
        k, c = r
        if i <= pairs:
            j, s = i + pairs, 1
        elif i <= 2 * pairs:
            j, s = i - pairs, neg(1)
        else:
            j, s = i, (neg(1) if dp.parity(f) == 0 else 1)
        add(vf.basis_index(k, j), neg(ctx.mul(s, c)))
    # d_t(f) E
    r = dp.mono_deriv(0, f)
    if r:
        k, c = r
        for i in others:
            prod = dp.mono_mul(k, dp.variable(i))
            if prod:
                kk, cc = prod
                add(vf.basis_index(kk, i), ctx.mul(c, cc))
    return {k: c for k, c in out.items() if c}


def contact_field_char2(vf: VectorFields, f: int, pairs: int) -> dict:
    """Contact field of f for the form dt + sum p_i dq_i in characteristic 2.

    K_f = (1 + E_p)(f) d_t + sum_i (d_{q_i} f + p_i d_t f) d_{p_i} + d_{p_i} f d_{q_i},
    with E_p = sum p_i d_{p_i}.
    """
    ctx = vf.ctx
    dp = vf.dp
    out: dict[int, int] = {}

    def add(idx, c):
        if c:
            out[idx] = ctx.add(out.get(idx, 0), c)

    a, _ = dp.monomials[f]
    add(vf.basis_index(f, 0), ctx.from_int(1 + sum(a[1:1 + pairs])))
    dt = dp.mono_deriv(0, f)
    for i in range(pairs):
        pi, qi = 1 + i, 1 + pairs + i
        r = dp.mono_deriv(qi, f)
        if r:
            add(vf.basis_index(r[0], pi), r[1])
        if dt:
            prod = dp.mono_mul(dt[0], dp.variable(pi))
            if prod:
                add(vf.basis_index(prod[0], pi), ctx.mul(dt[1], prod[1]))
        r = dp.mono_deriv(pi, f)
        if r:
            add(vf.basis_index(r[0], qi), r[1])
    return {k: c for k, c in out.items() if c}


def k_contact(pairs: int, N: Sequence[int], n_odd: int, ctx: FieldCtx) -> SuperAlgebra:
    """Contact fields on t, p_1..p_n, q_1..q_n (even) and theta_j (odd), deg t = 2."""
    m = 2 * pairs + 1
    names = ["t"] + [f"p{i + 1}" for i in range(pairs)] + [f"q{i + 1}" for i in range(pairs)]
    weights = [2] + [1] * (2 * pairs)
    dp = DividedPowerCtx(ctx, m, N, n_odd, even_names=names, weights=weights,
                         odd_names=[f"th{j + 1}" for j in range(n_odd)])
    vf = VectorFields(dp)
    if ctx.p == 2 and pairs:
        if n_odd:
            raise BadParams("mixed even pairs and odd indeterminates are not supported for p=2")
        fields = _independent(vf, [contact_field_char2(vf, f, pairs) for f in range(dp.dim)])
        return vf.algebra(fields, meta={"family": "k", "pairs": pairs, "N": list(dp.N), "n_odd": 0})
    gens = [contact_field(vf, f, pairs) for f in range(dp.dim)]
    if ctx.p == 2:
        # K_1 = 2 d_t vanishes; take d_t itself and close under brackets and squares
        gens[dp.unit_index()] = {vf.basis_index(dp.unit_index(), 0): 1}
        fields = generated_fields(vf, gens)
    else:
        fields = _independent(vf, gens)
    return vf.algebra(fields, meta={"family": "k", "pairs": pairs, "N": list(dp.N), "n_odd": n_odd})


def generated_fields(vf: VectorFields, gens: list[dict]) -> list[dict]:
    """Homogeneous basis of the subalgebra generated by homogeneous fields.

    In characteristic 2 the squares of odd fields are included.
    """
    from .linalg import Echelon

    ech = Echelon(vf.ctx, vf.dim)
    basis: list[dict] = []
    queue = [g for g in gens if g]
    while queue:
        f = queue.pop(0)
        if ech.add(vf.dense(f)) is None:
            continue
        new = [vf.bracket(f, b) for b in basis] + [vf.bracket(f, f)]
        if vf.ctx.p == 2 and vf.field_parity(f):
            new.append(vf.square(f))
        basis.append(f)
        queue.extend(w for w in new if w)
    return basis


def deform_onebarx(g: SuperAlgebra) -> SuperAlgebra:
    """The carrier {(1 - xbar) y} with the bracket of vector fields.

    When the carrier is not closed under the bracket of vect, the bracket
    of g is transported along y -> (1 - xbar) y instead, and the result is
    flagged with meta["deform"] = "transported".
    """
    vf = getattr(g, "vector_fields", None)
    if vf is None:
        raise NotVectorial("algebra was not built from vector fields")
    dp = vf.dp
    if dp.m == 0:
        raise NotVectorial("no even indeterminates to deform along")
    ctx = g.ctx
    top = dp.top_even_index()
    factor = {dp.unit_index(): 1}
    factor[top] = ctx.add(factor.get(top, 0), ctx.neg(1))
    new_fields = []
    for f in g.fields:
        comps = vf.components(f)
        new_fields.append(vf.from_components([dp.mul(factor, c) if c else {} for c in comps]))
    meta = dict(g.meta)
    try:
        out = _inhomogeneous_algebra(vf, new_fields, g)
        meta["deform"] = "closed"
    except NotAnIdeal:
        out = algebra_from_constants(ctx, g.names, g.parity,
                                     [(i, j, v) for (i, j), v in g.table.items() if i <= j],
                                     g.squares, None, meta)
        meta["deform"] = "transported"
    out.meta.update(meta)
    out.fields = new_fields
    out.vector_fields = vf
    return out


def _inhomogeneous_algebra(vf: VectorFields, fields: list[dict], like: SuperAlgebra) -> SuperAlgebra:
    """Algebra on the span of fields that are parity-homogeneous but maybe not graded."""
    from .linalg import CoordinateSystem

    ctx = vf.ctx
    coords = CoordinateSystem(ctx, vf.dim, [vf.dense(f) for f in fields])

    def to_coords(X):
        c = coords.coords(vf.dense(X))
        if c is None:
            raise NotAnIdeal("carrier is not closed under the bracket")
        return c

    n = len(fields)
    parity = list(like.parity)
    entries = []
    for i in range(n):
        for j in range(i, n):
            if i == j and (ctx.p == 2 or parity[i] == 0):
                continue
            w = vf.bracket(fields[i], fields[j])
            if w:
                entries.append((i, j, to_coords(w)))
    squares = None
    if ctx.p == 2:
        squares = {i: to_coords(vf.square(fields[i])) for i in range(n) if parity[i]}
    names = [f"(1-xbar)*{nm}" for nm in like.names]
    return algebra_from_constants(ctx, names, parity, entries, squares, None, {})


# -- file format ---------------------------------------------------------------------------

def _coeff_map(g: SuperAlgebra, v: Sequence[int]) -> dict:
    return {g.names[k]: g.ctx.serialize(c) for k, c in enumerate(v) if c}


def algebra_to_json(g: SuperAlgebra, expected: dict | None = None) -> dict:
    ctx = g.ctx
    basis = []
    for i, name in enumerate(g.names):
        entry = {"name": name, "parity": g.parity[i]}
        if g.grading is not None:
            entry["degree"] = g.grading[i]
        basis.append(entry)
    brackets = []
    for (i, j), sv in sorted(g.table.items()):
        if i > j:
            continue
        brackets.append([g.names[i], g.names[j], {g.names[k]: ctx.serialize(c) for k, c in sv}])
    out = {"format": FORMAT, "field": ctx.spec(), "basis": basis, "brackets": brackets}
    if ctx.p == 2 and g.squares:
        out["squares"] = [[g.names[i], {g.names[k]: ctx.serialize(c) for k, c in sv}]
                          for i, sv in sorted(g.squares.items()) if sv]
    meta = {k: v for k, v in g.meta.items() if k != "expected_witness" and _jsonable(v)}
    if meta:
        out["meta"] = meta
    if expected is None:
        expected = g.meta.get("expected_witness")
    if expected:
        out["expected_witness"] = expected
    return out


def _jsonable(v) -> bool:
    try:
        json.dumps(v)
        return True
    except TypeError:
        return False


def dumps_algebra(g: SuperAlgebra, expected: dict | None = None) -> str:
    return json.dumps(algebra_to_json(g, expected), sort_keys=True, indent=1, ensure_ascii=False) + "\n"


def save_algebra_file(g: SuperAlgebra, path, expected: dict | None = None) -> None:
    Path(path).write_text(dumps_algebra(g, expected), encoding="utf-8")


def algebra_from_json(doc: dict, check: bool = True) -> SuperAlgebra:
    try:
        if doc.get("format") != FORMAT:
            raise ParseError(f"unknown format tag {doc.get('format')!r}")
        ctx = field_from_spec(doc["field"])
        basis = doc["basis"]
        names = [b["name"] for b in basis]
        parity = [int(b.get("parity", 0)) for b in basis]
        degs = [b.get("degree") for b in basis]
        grading = degs if all(d is not None for d in degs) else None
        pos = {nm: i for i, nm in enumerate(names)}

        def vec(mapping):
            return {pos[k]: ctx.parse(v) for k, v in mapping.items()}

        brackets = [(pos[a], pos[b], vec(v)) for a, b, v in doc.get("brackets", [])]
        squares = {pos[a]: vec(v) for a, v in doc.get("squares", [])} or None
        meta = dict(doc.get("meta", {}))
        if "expected_witness" in doc:
            meta["expected_witness"] = doc["expected_witness"]
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed algebra file: {exc!r}") from exc
    g = algebra_from_constants(ctx, names, parity, brackets, squares, grading, meta)
    if check:
        report = check_axioms(g, stop_after=8)
        if not report.ok:
            first = report.violations[0]
            raise AxiomFailure(f"axiom violated: {first[0]} on {first[1:-1]}", report.violations)
    return g


def load_algebra_file(path, check: bool = True) -> SuperAlgebra:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: not JSON ({exc.msg})") from exc
    g = algebra_from_json(doc, check)
    g.source_path = str(path)
    g.digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
    return g


def expected_witness(g: SuperAlgebra):
    """The expected-witness block of a loaded file as a StructureWitness (or None)."""
    block = g.meta.get("expected_witness")
    if not block:
        return None
    return witness_from_json(g, block)


def witness_from_json(g: SuperAlgebra, block: dict):
    """Inverse of StructureWitness.to_json; images may also be {name: coeff} maps."""
    from .restrict import StructureWitness

    ctx = g.ctx
    pos = {nm: i for i, nm in enumerate(g.names)}

    def table(t):
        if any(k not in pos for k in (t or {})):
            raise ParseError(f"witness names outside the basis: {sorted(set(t) - set(pos))}")
        out = {}
        for k, v in (t or {}).items():
            if isinstance(v, list):
                if len(v) != g.n:
                    raise ParseError(f"witness image of {k} has length {len(v)}, expected {g.n}")
                vec = [ctx.parse(c) for c in v]
            else:
                vec = g.zero()
                for nm, c in v.items():
                    vec[pos[nm]] = ctx.parse(c)
            out[pos[k]] = vec
        return out

    exps = block.get("exponents", [ctx.p, 2 * ctx.p])
    split = tuple(block["split"]) if block.get("split") is not None else None
    return StructureWitness(block.get("variant", "p"), table(block.get("low")), table(block.get("high")),
                            split=split, exponent_low=exps[0], exponent_high=exps[1])


# -- family references -------------------------------------------------------------------------

def _parse_int_list(s: str) -> list[int]:
    s = s.strip().strip("()[]")
    return [int(x) for x in s.replace(";", ",").replace("/", ",").split(",") if x.strip()] if s else []


FAMILIES = {
    "gl": "gl(n): n",
    "sl": "sl(n): n",
    "psl": "psl(n): n",
    "o_I": "o_I(n), symmetric matrices for p=2: n",
    "o_Pi": "o_Pi(n), n even: n",
    "ZD": "symmetric zero-diagonal matrices: n",
    "o_I_sl": "traceless symmetric matrices: n",
    "o1_odd": "matrix model of o^(1)(2n+1) with block grading: n",
    "q": "q(n): n, or q:<ref> for the queerification of a restricted algebra",
    "sq": "sq(n): n",
    "psq": "psq(n): n",
    "s_e_sq": "s_e sq(n): n",
    "ps_e_psq": "ps_e psq(n), n even: n",
    "oo1_IPi": "first derived of oo_{I Pi}(a|b): a, b",
    "oo1_JPi": "graded model of oo^(1)(2n+1|b): n, b",
    "oo1_IPi_1_2": "3|2-dimensional example with named basis",
    "vect": "vect(m;N|n_odd): m, N, n_odd",
    "svect": "svect(m;N|n_odd): m, N, n_odd",
    "h": "Hamiltonian fields: m, N, form in {I, Pi, I_pqx}",
    "k": "contact fields: pairs, N, n_odd",
}


def parse_ref(ref: str) -> tuple[str, dict]:
    """'o_I:n=5,p=2' -> ('o_I', {'n': '5', 'p': '2'}); 'psl3' -> ('psl', {'n': '3'})."""
    ref = ref.strip()
    if ":" in ref:
        fam, rest = ref.split(":", 1)
    else:
        fam, rest = ref, ""
    params: dict[str, str] = {}
    if rest and "=" not in rest:
        params["of"] = rest
        return fam, params
    depth = 0
    cur = ""
    parts = []
    for ch in rest:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    if cur:
        parts.append(cur)
    for part in parts:
        if "=" not in part:
            raise ParseError(f"bad parameter {part!r} in {ref!r}")
        k, v = part.split("=", 1)
        params[k.strip()] = v.strip()
    if fam not in FAMILIES:
        head = fam.rstrip("0123456789")
        tail = fam[len(head):]
        if head in FAMILIES and tail:
            fam = head
            params.setdefault("n", tail)
    if fam not in FAMILIES:
        raise ParseError(f"unknown family {fam!r}")
    return fam, params


def build(ref: str, ctx: FieldCtx | None = None) -> SuperAlgebra:
    """Build a catalog algebra from a reference string."""
    fam, params = parse_ref(ref)
    if ctx is None:
        ctx = ff_make(int(params.pop("p", 2)), int(params.pop("k", 1)))
    else:
        params.pop("p", None)
        params.pop("k", None)
    if "of" in params:
        if fam != "q":
            raise ParseError(f"only q accepts an algebra argument, got {ref!r}")
        from .superize import queerify_restricted

        base = build(params["of"], ctx)
        return queerify_restricted(base)

    def n(key="n"):
        try:
            return int(params[key])
        except KeyError as exc:
            raise BadParams(f"{fam} needs parameter {key}") from exc

    def shear(m):
        return _parse_int_list(params["N"]) if "N" in params else [1] * m

    simple = {"gl": gl, "sl": sl, "psl": psl, "o_I": o_I, "o_Pi": o_Pi, "ZD": zd, "o_I_sl": o_I_sl, "o1_odd": o1_odd_model,
              "q": q, "sq": sq, "psq": psq, "s_e_sq": s_e_sq, "ps_e_psq": ps_e_psq}
    if fam in simple:
        return simple[fam](n(), ctx)
    if fam == "oo1_IPi":
        return oo_IPi(n("a"), n("b"), ctx)
    if fam == "oo1_JPi":
        return oo_JPi_graded(n("n"), n("b"), ctx)
    if fam == "oo1_IPi_1_2":
        return oo1_IPi_1_2(ctx)
    if fam in ("vect", "svect"):
        m = n("m")
        ctor = vect if fam == "vect" else svect
        return ctor(m, shear(m), int(params.get("n_odd", 0)), ctx)
    if fam == "h":
        m = n("m")
        return h_B(m, shear(m), ctx, params.get("form", "I"))
    if fam == "k":
        pairs = n("pairs")
        return k_contact(pairs, shear(2 * pairs + 1), int(params.get("n_odd", 0)), ctx)
    raise ParseError(f"unknown family {fam!r}")
