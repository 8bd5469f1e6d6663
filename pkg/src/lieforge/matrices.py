"""Lie (super)algebras spanned by explicit matrices.

Matrices are row lists; a matrix algebra is given by a list of basis
matrices with parities, and its bracket is the supercommutator expressed
back in the basis.
"""

from __future__ import annotations

from typing import Sequence

from .errors import NotAnIdeal
from .ffield import FieldCtx
from .linalg import CoordinateSystem, axpy, mat_mul
from .superalg import SuperAlgebra, algebra_from_constants

Matrix = list


def zeros(n: int, m: int | None = None) -> Matrix:
    return [[0] * (n if m is None else m) for _ in range(n)]


def elementary(n: int, i: int, j: int, m: int | None = None) -> Matrix:
    e = zeros(n, m)
    e[i][j] = 1
    return e


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def flat(a: Matrix) -> list[int]:
    return [x for row in a for x in row]


def unflat(v: Sequence[int], n: int) -> Matrix:
    return [list(v[i * n:(i + 1) * n]) for i in range(n)]


def madd(ctx: FieldCtx, a: Matrix, b: Matrix, c: int = 1) -> Matrix:
    """a + c*b."""
    return [axpy(ctx, c, rb, ra) for ra, rb in zip(a, b)]


def mscale(ctx: FieldCtx, c: int, a: Matrix) -> Matrix:
    return [[ctx.mul(c, x) for x in r] for r in a]


def mmul(ctx: FieldCtx, a: Matrix, b: Matrix) -> Matrix:
    return mat_mul(ctx, a, b, len(b[0]) if b else 0)


def transpose(a: Matrix) -> Matrix:
    return [list(c) for c in zip(*a)]


def trace(ctx: FieldCtx, a: Matrix) -> int:
    t = 0
    for i in range(len(a)):
        t = ctx.add(t, a[i][i])
    return t


def supercommutator(ctx: FieldCtx, a: Matrix, b: Matrix, pa: int = 0, pb: int = 0) -> Matrix:
    """ab - (-1)^{pa pb} ba."""
    ab = mmul(ctx, a, b)
    ba = mmul(ctx, b, a)
    sign = 1 if (pa and pb) else ctx.neg(1)
    return madd(ctx, ab, ba, sign)


def apply(ctx: FieldCtx, a: Matrix, v: Sequence[int]) -> list[int]:
    out = [0] * len(a)
    for i, row in enumerate(a):
        s = 0
        for x, y in zip(row, v):
            if x and y:
                s = ctx.add(s, ctx.mul(x, y))
        out[i] = s
    return out


class MatrixAlgebra:
    """A basis of matrices together with the induced (super)algebra."""

    def __init__(self, ctx: FieldCtx, mats: Sequence[Matrix], names: Sequence[str],
                 parity: Sequence[int] | None = None, grading: Sequence[int] | None = None,
                 meta: dict | None = None, square_fn=None):
        self.ctx = ctx
        self.mats = [[list(r) for r in m] for m in mats]
        self.size = len(self.mats[0]) if self.mats else 0
        self.names = list(names)
        self.parity = list(parity) if parity is not None else [0] * len(self.mats)
        self.coords_system = CoordinateSystem(ctx, self.size * self.size, [flat(m) for m in self.mats])
        self.algebra = self._build(grading, meta or {}, square_fn)

    def coords(self, m: Matrix) -> list[int]:
        c = self.coords_system.coords(flat(m))
        if c is None:
            raise NotAnIdeal("matrix lies outside the span of the basis")
        return c

    def matrix(self, coords: Sequence[int]) -> Matrix:
        return unflat(self.coords_system.vector(coords), self.size)

    def _build(self, grading, meta, square_fn) -> SuperAlgebra:
        ctx = self.ctx
        n = len(self.mats)
        entries = []
        for i in range(n):
            for j in range(i, n):
                if i == j and (ctx.p == 2 or self.parity[i] == 0):
                    continue
                c = supercommutator(ctx, self.mats[i], self.mats[j], self.parity[i], self.parity[j])
                if any(any(r) for r in c):
                    entries.append((i, j, self.coords(c)))
        squares = None
        if ctx.p == 2:
            squares = {}
            for i in range(n):
                if self.parity[i]:
                    sq = square_fn(self.mats[i]) if square_fn else mmul(ctx, self.mats[i], self.mats[i])
                    squares[i] = self.coords(sq)
        return algebra_from_constants(ctx, self.names, self.parity, entries, squares, grading, meta)
