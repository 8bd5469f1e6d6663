"""Dense exact linear algebra over a :class:`FieldCtx`.

Vectors are lists of field ints.  Elimination over GF(2) packs each row into
a Python int (bit ``j`` = column ``j``) and clears columns with word-level
XOR; every other field runs the generic row-operation kernel.  Both paths
return the same canonical RREF (leftmost pivots, pivot entries 1, pivot
columns cleared above and below).
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .errors import AmbientMismatch, DimensionMismatch, NotSquare, SizeCapExceeded
from .ffield import FieldCtx

SIZE_CAP = 1 << 26

Vec = list


def _is_gf2(ctx: FieldCtx) -> bool:
    return ctx.p == 2 and ctx.k == 1


def _check_cap(rows: int, cols: int) -> None:
    if rows * cols > SIZE_CAP:
        raise SizeCapExceeded(f"{rows}x{cols} matrix exceeds the 2^26 entry cap")


# -- vector kernels ------------------------------------------------------------

def axpy(ctx: FieldCtx, c: int, x: Sequence[int], y: Sequence[int]) -> list[int]:
    """y + c*x."""
    if c == 0:
        return list(y)
    if ctx.k == 1:
        p = ctx.p
        if p == 2:
            return [a ^ b for a, b in zip(x, y)]
        return [(b + c * a) % p for a, b in zip(x, y)]
    mul, add = ctx.mul, ctx.add
    return [add(b, mul(c, a)) if a else b for a, b in zip(x, y)]


def scale(ctx: FieldCtx, c: int, x: Sequence[int]) -> list[int]:
    if ctx.k == 1:
        return [c * a % ctx.p for a in x]
    mul = ctx.mul
    return [mul(c, a) for a in x]


def vec_add(ctx: FieldCtx, x: Sequence[int], y: Sequence[int]) -> list[int]:
    return axpy(ctx, 1, x, y)


def vec_sub(ctx: FieldCtx, x: Sequence[int], y: Sequence[int]) -> list[int]:
    return axpy(ctx, ctx.neg(1), y, x)


def dot(ctx: FieldCtx, x: Sequence[int], y: Sequence[int]) -> int:
    if ctx.k == 1:
        return sum(a * b for a, b in zip(x, y)) % ctx.p
    acc = 0
    for a, b in zip(x, y):
        if a and b:
            acc = ctx.add(acc, ctx.mul(a, b))
    return acc


def lin_comb(ctx: FieldCtx, coeffs: Sequence[int], vectors: Sequence[Sequence[int]], n: int) -> list[int]:
    out = [0] * n
    for c, v in zip(coeffs, vectors):
        if c:
            out = axpy(ctx, c, v, out)
    return out


def pack(row: Sequence[int]) -> int:
    v = 0
    for j, a in enumerate(row):
        if a:
            v |= 1 << j
    return v


def unpack(bits: int, n: int) -> list[int]:
    return [(bits >> j) & 1 for j in range(n)]


# -- elimination -----------------------------------------------------------------

def _rref_gf2(rows: list[int], ncols: int) -> tuple[list[int], list[int]]:
    work = [r for r in rows if r]
    pivots: list[int] = []
    out: list[int] = []
    while work:
        # leftmost pivot among remaining rows
        low = min(r & -r for r in work)
        col = low.bit_length() - 1
        idx = next(i for i, r in enumerate(work) if r & low)
        prow = work.pop(idx)
        work = [r ^ prow if r & low else r for r in work]
        work = [r for r in work if r]
        out = [r ^ prow if r & low else r for r in out]
        out.append(prow)
        pivots.append(col)
    return out, pivots


def _rref_generic(ctx: FieldCtx, rows: list[list[int]], ncols: int) -> tuple[list[list[int]], list[int]]:
    work = [list(r) for r in rows if any(r)]
    out: list[list[int]] = []
    pivots: list[int] = []
    col = 0
    neg = ctx.neg
    while work and col < ncols:
        idx = next((i for i, r in enumerate(work) if r[col]), None)
        if idx is None:
            col += 1
            continue
        prow = work.pop(idx)
        piv = prow[col]
        if piv != 1:
            prow = scale(ctx, ctx.inv(piv), prow)
        new_work = []
        for r in work:
            if r[col]:
                r = axpy(ctx, neg(r[col]), prow, r)
            if any(r):
                new_work.append(r)
        work = new_work
        out = [axpy(ctx, neg(r[col]), prow, r) if r[col] else r for r in out]
        out.append(prow)
        pivots.append(col)
        col += 1
    return out, pivots


def rref_rows(ctx: FieldCtx, rows: Iterable[Sequence[int]], ncols: int) -> tuple[list[list[int]], list[int]]:
    """Canonical RREF of a row list; returns (nonzero rows, pivot columns)."""
    rows = [list(r) for r in rows]
    _check_cap(len(rows), ncols)
    if _is_gf2(ctx):
        packed, pivots = _rref_gf2([pack(r) for r in rows], ncols)
        order = sorted(range(len(pivots)), key=pivots.__getitem__)
        return [unpack(packed[i], ncols) for i in order], [pivots[i] for i in order]
    return _rref_generic(ctx, rows, ncols)


def rref_reference(ctx: FieldCtx, rows: Sequence[Sequence[int]], ncols: int) -> tuple[list[list[int]], list[int]]:
    """Textbook Gauss-Jordan without packing; kept as the test oracle."""
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(m)) if m[i][c]), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = ctx.inv(m[r][c])
        m[r] = [ctx.mul(inv, a) for a in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [ctx.sub(a, ctx.mul(f, b)) for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m[:r], pivots


# -- matrices ----------------------------------------------------------------------

class MatrixGF:
    """Dense matrix over a field; treat as immutable."""

    __slots__ = ("ctx", "nrows", "ncols", "rows")

    def __init__(self, ctx: FieldCtx, rows: Sequence[Sequence[int]], ncols: int | None = None):
        self.ctx = ctx
        self.rows = [list(r) for r in rows]
        self.nrows = len(self.rows)
        self.ncols = ncols if ncols is not None else (len(self.rows[0]) if self.rows else 0)
        _check_cap(self.nrows, self.ncols)
        if any(len(r) != self.ncols for r in self.rows):
            raise DimensionMismatch("ragged rows")

    @classmethod
    def zeros(cls, ctx: FieldCtx, nrows: int, ncols: int) -> "MatrixGF":
        return cls(ctx, [[0] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, ctx: FieldCtx, n: int) -> "MatrixGF":
        return cls(ctx, [[1 if i == j else 0 for j in range(n)] for i in range(n)], n)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def transpose(self) -> "MatrixGF":
        return MatrixGF(self.ctx, [list(c) for c in zip(*self.rows)] if self.nrows else [], self.nrows)

    def __matmul__(self, other: "MatrixGF") -> "MatrixGF":
        return MatrixGF(self.ctx, mat_mul(self.ctx, self.rows, other.rows, other.ncols), other.ncols)

    def __add__(self, other: "MatrixGF") -> "MatrixGF":
        return MatrixGF(self.ctx, [vec_add(self.ctx, a, b) for a, b in zip(self.rows, other.rows)], self.ncols)

    def __sub__(self, other: "MatrixGF") -> "MatrixGF":
        return MatrixGF(self.ctx, [vec_sub(self.ctx, a, b) for a, b in zip(self.rows, other.rows)], self.ncols)

    def apply(self, v: Sequence[int]) -> list[int]:
        if len(v) != self.ncols:
            raise DimensionMismatch(f"vector of length {len(v)} for {self.ncols} columns")
        return [dot(self.ctx, r, v) for r in self.rows]

    def flat(self) -> list[int]:
        return [a for r in self.rows for a in r]

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.rows)

    def __eq__(self, other) -> bool:
        return isinstance(other, MatrixGF) and self.ctx == other.ctx and self.rows == other.rows and self.ncols == other.ncols

    def __hash__(self) -> int:
        return hash(tuple(map(tuple, self.rows)))

    def __repr__(self) -> str:
        return f"MatrixGF({self.nrows}x{self.ncols}, {self.rows})"


def mat_mul(ctx: FieldCtx, a: Sequence[Sequence[int]], b: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """Row-list product a*b."""
    if _is_gf2(ctx):
        bp = [pack(r) for r in b]
        out = []
        for r in a:
            acc = 0
            for j, x in enumerate(r):
                if x:
                    acc ^= bp[j]
            out.append(unpack(acc, ncols))
        return out
    out = []
    for r in a:
        acc = [0] * ncols
        for j, x in enumerate(r):
            if x:
                acc = axpy(ctx, x, b[j], acc)
        out.append(acc)
    return out


def rref(m: MatrixGF) -> tuple[MatrixGF, int, list[int]]:
    """Same shape as m; zero rows trail the pivot rows."""
    rows, piv = rref_rows(m.ctx, m.rows, m.ncols)
    rows += [[0] * m.ncols for _ in range(m.nrows - len(rows))]
    return MatrixGF(m.ctx, rows, m.ncols), len(piv), piv


def rank(m: MatrixGF) -> int:
    return rref(m)[1]


def solve_rows(ctx: FieldCtx, rows: Sequence[Sequence[int]], ncols: int, b: Sequence[int]) -> list[int] | None:
    """Solve rows*x = b; free variables set to zero; None when inconsistent."""
    if len(rows) != len(b):
        raise DimensionMismatch(f"{len(rows)} rows but right-hand side of length {len(b)}")
    aug = [list(r) + [bi] for r, bi in zip(rows, b)]
    red, piv = rref_rows(ctx, aug, ncols + 1)
    if piv and piv[-1] == ncols:
        return None
    x = [0] * ncols
    for r, c in zip(red, piv):
        x[c] = r[ncols]
    return x


def solve(a: MatrixGF, b: Sequence[int]) -> list[int] | None:
    return solve_rows(a.ctx, a.rows, a.ncols, b)


def kernel_rows(ctx: FieldCtx, rows: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """Basis of {x : rows*x = 0}, one vector per free column (in RREF form)."""
    red, piv = rref_rows(ctx, rows, ncols)
    pivset = set(piv)
    basis = []
    neg = ctx.neg
    for f in range(ncols):
        if f in pivset:
            continue
        v = [0] * ncols
        v[f] = 1
        for r, c in zip(red, piv):
            if r[f]:
                v[c] = neg(r[f])
        basis.append(v)
    return basis


def kernel(a: MatrixGF) -> "Subspace":
    return Subspace(a.ctx, a.ncols, kernel_rows(a.ctx, a.rows, a.ncols))


def mat_power_p(a: MatrixGF, e: int) -> MatrixGF:
    """a**e by repeated squaring."""
    if a.nrows != a.ncols:
        raise NotSquare(f"{a.nrows}x{a.ncols} is not square")
    if e < 1:
        raise ValueError("exponent must be positive")
    return MatrixGF(a.ctx, mat_pow_rows(a.ctx, a.rows, e), a.ncols)


def mat_pow_rows(ctx: FieldCtx, a: Sequence[Sequence[int]], e: int) -> list[list[int]]:
    n = len(a)
    result = None
    base = [list(r) for r in a]
    while e:
        if e & 1:
            result = base if result is None else mat_mul(ctx, result, base, n)
        e >>= 1
        if e:
            base = mat_mul(ctx, base, base, n)
    return [list(r) for r in result]


# -- subspaces ---------------------------------------------------------------------------

class Subspace:
    """Row span of a set of vectors, stored as canonical RREF."""

    __slots__ = ("ctx", "ambient", "basis", "pivots")

    def __init__(self, ctx: FieldCtx, ambient: int, vectors: Iterable[Sequence[int]] = ()):
        self.ctx = ctx
        self.ambient = ambient
        vecs = [list(v) for v in vectors]
        if any(len(v) != ambient for v in vecs):
            raise AmbientMismatch("vector length differs from ambient dimension")
        self.basis, self.pivots = rref_rows(ctx, vecs, ambient)

    @classmethod
    def full(cls, ctx: FieldCtx, n: int) -> "Subspace":
        return cls(ctx, n, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, ctx: FieldCtx, n: int) -> "Subspace":
        return cls(ctx, n, [])

    @property
    def dim(self) -> int:
        return len(self.basis)

    def _same(self, other: "Subspace") -> None:
        if self.ambient != other.ambient or self.ctx != other.ctx:
            raise AmbientMismatch(f"ambient {self.ambient} vs {other.ambient}")

    def reduce(self, v: Sequence[int]) -> list[int]:
        """Residual of v after clearing the pivot columns."""
        v = list(v)
        neg = self.ctx.neg
        for r, c in zip(self.basis, self.pivots):
            if v[c]:
                v = axpy(self.ctx, neg(v[c]), r, v)
        return v

    def contains(self, v: Sequence[int]) -> bool:
        if len(v) != self.ambient:
            raise AmbientMismatch("vector length differs from ambient dimension")
        return not any(self.reduce(v))

    __contains__ = contains

    def coordinates(self, v: Sequence[int]) -> list[int] | None:
        """Coefficients of v in the stored basis, or None when v is outside."""
        if any(self.reduce(v)):
            return None
        return [v[c] for c in self.pivots]

    def contains_space(self, other: "Subspace") -> bool:
        self._same(other)
        return all(self.contains(v) for v in other.basis)

    def __add__(self, other: "Subspace") -> "Subspace":
        self._same(other)
        return Subspace(self.ctx, self.ambient, self.basis + other.basis)

    def intersect(self, other: "Subspace") -> "Subspace":
        self._same(other)
        if not self.basis or not other.basis:
            return Subspace.zero(self.ctx, self.ambient)
        # a.U = b.V  <=>  [U; -V]^T (a, b) = 0
        neg = self.ctx.neg
        stacked = self.basis + [[neg(x) for x in v] for v in other.basis]
        cols = [list(c) for c in zip(*stacked)]
        ker = kernel_rows(self.ctx, cols, len(stacked))
        du = len(self.basis)
        vecs = [lin_comb(self.ctx, k[:du], self.basis, self.ambient) for k in ker]
        return Subspace(self.ctx, self.ambient, vecs)

    __and__ = intersect

    def complement_basis(self) -> list[list[int]]:
        """Standard basis vectors on the non-pivot columns."""
        piv = set(self.pivots)
        return [[1 if i == j else 0 for i in range(self.ambient)] for j in range(self.ambient) if j not in piv]

    def __eq__(self, other) -> bool:
        return (isinstance(other, Subspace) and self.ambient == other.ambient
                and self.ctx == other.ctx and self.basis == other.basis)

    def __hash__(self) -> int:
        return hash((self.ambient, tuple(map(tuple, self.basis))))

    def __le__(self, other: "Subspace") -> bool:
        return other.contains_space(self)

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim} in {self.ambient})"


def span(ctx: FieldCtx, n: int, vectors: Iterable[Sequence[int]]) -> Subspace:
    return Subspace(ctx, n, vectors)


def unit(n: int, i: int) -> list[int]:
    v = [0] * n
    v[i] = 1
    return v


class Echelon:
    """Incrementally grown semi-echelon basis.

    Each stored row has a distinct leading column and is zero in the leading
    columns of all rows stored before it; :meth:`reduce` clears leading
    columns in ascending order.  GF(2) rows live packed in ints.
    """

    __slots__ = ("ctx", "n", "_packed", "_rows", "_lead", "_order")

    def __init__(self, ctx: FieldCtx, n: int, vectors: Iterable[Sequence[int]] = ()):
        self.ctx = ctx
        self.n = n
        self._packed = _is_gf2(ctx)
        self._rows: dict[int, object] = {}
        self._order: list[int] = []
        for v in vectors:
            self.add(v)

    def __len__(self) -> int:
        return len(self._rows)

    def reduce(self, v: Sequence[int]):
        if self._packed:
            bits = pack(v) if not isinstance(v, int) else v
            for c in sorted(self._rows):
                if (bits >> c) & 1:
                    bits ^= self._rows[c]
            return bits
        v = list(v)
        neg = self.ctx.neg
        for c in sorted(self._rows):
            if v[c]:
                v = axpy(self.ctx, neg(v[c]), self._rows[c], v)
        return v

    def add(self, v: Sequence[int]) -> list[int] | None:
        """Insert v; returns its normalized residual (None if dependent)."""
        r = self.reduce(v)
        if self._packed:
            if not r:
                return None
            lead = (r & -r).bit_length() - 1
            self._rows[lead] = r
            self._order.append(lead)
            return unpack(r, self.n)
        lead = next((i for i, a in enumerate(r) if a), None)
        if lead is None:
            return None
        if r[lead] != 1:
            r = scale(self.ctx, self.ctx.inv(r[lead]), r)
        self._rows[lead] = r
        self._order.append(lead)
        return r

    def contains(self, v: Sequence[int]) -> bool:
        r = self.reduce(v)
        return not r if self._packed else not any(r)

    def vectors(self) -> list[list[int]]:
        """Stored rows in insertion order."""
        if self._packed:
            return [unpack(self._rows[c], self.n) for c in self._order]
        return [list(self._rows[c]) for c in self._order]

    def subspace(self) -> "Subspace":
        return Subspace(self.ctx, self.n, self.vectors())


def solve_many(ctx: FieldCtx, rows: Sequence[Sequence[int]], ncols: int,
               rhs: Sequence[Sequence[int]]) -> list[list[int] | None]:
    """Solve rows*x = b for every b in ``rhs`` with one elimination.

    The right-hand sides are appended as extra columns.  Rows whose
    coefficient part vanishes after elimination span the left kernel applied
    to the right-hand sides, so b is consistent iff its column is zero there.
    """
    m = len(rhs)
    if any(len(b) != len(rows) for b in rhs):
        raise DimensionMismatch("right-hand side length differs from the row count")
    aug = [list(r) + [b[i] for b in rhs] for i, r in enumerate(rows)]
    red, piv = rref_rows(ctx, aug, ncols + m)
    bad = set()
    for r, c in zip(red, piv):
        if c >= ncols:
            bad.update(j for j in range(m) if r[ncols + j])
    out: list[list[int] | None] = []
    for j in range(m):
        if j in bad:
            out.append(None)
            continue
        x = [0] * ncols
        for r, c in zip(red, piv):
            if c < ncols:
                x[c] = r[ncols + j]
        out.append(x)
    return out


class CoordinateSystem:
    """Coordinates with respect to a fixed (not necessarily echelon) basis."""

    def __init__(self, ctx: FieldCtx, n: int, basis: Sequence[Sequence[int]]):
        self.ctx = ctx
        self.n = n
        self.basis = [list(b) for b in basis]
        self.space = Subspace(ctx, n, self.basis)
        if self.space.dim != len(self.basis):
            raise DimensionMismatch("basis vectors are linearly dependent")
        d = len(self.basis)
        # basis_i = sum_j T[i][j] rref_j with T[i][j] = basis_i[pivot_j]
        t = [[b[c] for c in self.space.pivots] for b in self.basis]
        self._tinv = _invert(ctx, t) if d else []

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coords(self, v: Sequence[int]) -> list[int] | None:
        c = self.space.coordinates(v)
        if c is None:
            return None
        d = self.dim
        out = [0] * d
        for j, a in enumerate(c):
            if a:
                out = axpy(self.ctx, a, self._tinv[j], out)
        return out

    def vector(self, coords: Sequence[int]) -> list[int]:
        return lin_comb(self.ctx, coords, self.basis, self.n)


def _invert(ctx: FieldCtx, a: Sequence[Sequence[int]]) -> list[list[int]]:
    n = len(a)
    aug = [list(r) + unit(n, i) for i, r in enumerate(a)]
    red, piv = rref_rows(ctx, aug, 2 * n)
    if piv[:n] != list(range(n)) or len(piv) < n:
        raise DimensionMismatch("matrix is singular")
    return [r[n:] for r in red[:n]]
