"""Finite-dimensional Lie (super)algebras given by structure constants.

A :class:`SuperAlgebra` stores, for every ordered pair of basis vectors, the
sparse expansion of their bracket, and for p=2 the squares of the odd basis
vectors.  Vectors are coefficient lists over the field of the algebra.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import (
    BadDimensions,
    IncompatibleGrading,
    IterationCapExceeded,
    NoGrading,
    NotAnIdeal,
    NotOdd,
    ParityViolation,
    SymmetryViolation,
    WrongCharacteristic,
)
from .ffield import FieldCtx
from .linalg import (
    Echelon,
    Subspace,
    axpy,
    kernel_rows,
    lin_comb,
    mat_mul,
    pack,
    scale,
    unit,
    unpack,
)

ROUND_CAP = 64

Sparse = tuple  # tuple of (index, coeff) pairs


def _sparse(vec: Sequence[int]) -> Sparse:
    return tuple((k, c) for k, c in enumerate(vec) if c)


def _sparse_from(ctx: FieldCtx, value, n: int) -> Sparse:
    """Accept a dense list, a {index: coeff} mapping or (index, coeff) pairs."""
    if isinstance(value, Mapping):
        items = value.items()
    elif value and isinstance(value[0], (tuple, list)):
        items = value
    else:
        if len(value) != n:
            raise BadDimensions(f"dense vector of length {len(value)} in a {n}-dimensional algebra")
        items = enumerate(value)
    acc: dict[int, int] = {}
    for k, c in items:
        k = int(k)
        if not 0 <= k < n:
            raise BadDimensions(f"basis index {k} out of range")
        c = ctx.parse(c) if not isinstance(c, int) else c % ctx.order if ctx.k > 1 else c % ctx.p
        if c:
            acc[k] = ctx.add(acc.get(k, 0), c)
    return tuple((k, c) for k, c in sorted(acc.items()) if c)


class SuperAlgebra:
    """Lie superalgebra (Lie algebra when there are no odd basis vectors).

    ``parity[i]`` is 0 for even and 1 for odd basis vectors.  ``table`` maps
    every ordered pair (i, j) with a nonzero bracket to its sparse expansion.
    ``squares`` (p=2 only) maps odd basis indices to their squares.
    """

    def __init__(self, ctx: FieldCtx, names: Sequence[str], parity: Sequence[int],
                 table: Mapping, squares: Mapping | None = None,
                 grading: Sequence[int] | None = None, meta: Mapping | None = None):
        self.ctx = ctx
        self.names = tuple(names)
        self.parity = tuple(int(x) for x in parity)
        self.n = len(self.names)
        self.table: dict[tuple[int, int], Sparse] = dict(table)
        self.squares: dict[int, Sparse] = dict(squares or {})
        self.grading = tuple(grading) if grading is not None else None
        self.meta = dict(meta or {})
        self._ad: dict[int, list[list[int]]] = {}
        self._ad_packed: dict[int, list[int]] = {}

    # -- basic data ------------------------------------------------------------------
    @property
    def p(self) -> int:
        return self.ctx.p

    @property
    def dim(self) -> int:
        return self.n

    @property
    def even(self) -> list[int]:
        return [i for i, s in enumerate(self.parity) if s == 0]

    @property
    def odd(self) -> list[int]:
        return [i for i, s in enumerate(self.parity) if s == 1]

    @property
    def dim_even(self) -> int:
        return len(self.even)

    @property
    def dim_odd(self) -> int:
        return len(self.odd)

    @property
    def sdim(self) -> tuple[int, int]:
        return (self.dim_even, self.dim_odd)

    def is_lie(self) -> bool:
        return self.dim_odd == 0

    def zero(self) -> list[int]:
        return [0] * self.n

    def basis(self, i: int) -> list[int]:
        return unit(self.n, i)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def vec(self, spec: Mapping[str, object] | str) -> list[int]:
        """Vector from {name: coeff} or a single basis name."""
        if isinstance(spec, str):
            return self.basis(self.index(spec))
        v = self.zero()
        for name, c in spec.items():
            v[self.index(name)] = self.ctx.add(v[self.index(name)], self.ctx.parse(c))
        return v

    def parity_of(self, v: Sequence[int]) -> int | None:
        """0 or 1 for homogeneous v (0 for v = 0), None for mixed."""
        ev = any(c for c, s in zip(v, self.parity) if s == 0 and c)
        od = any(c for c, s in zip(v, self.parity) if s == 1 and c)
        if ev and od:
            return None
        return 1 if od else 0

    def split_parity(self, v: Sequence[int]) -> tuple[list[int], list[int]]:
        ev = [c if s == 0 else 0 for c, s in zip(v, self.parity)]
        od = [c if s == 1 else 0 for c, s in zip(v, self.parity)]
        return ev, od

    def format(self, v: Sequence[int]) -> str:
        terms = []
        for i, c in enumerate(v):
            if c:
                coef = "" if c == 1 else f"({self.ctx.format(c)})*"
                terms.append(f"{coef}{self.names[i]}")
        return " + ".join(terms) if terms else "0"

    # -- bracket and squares -------------------------------------------------------
    def bracket(self, x: Sequence[int], y: Sequence[int]) -> list[int]:
        ctx = self.ctx
        xs = [(i, a) for i, a in enumerate(x) if a]
        ys = [(j, b) for j, b in enumerate(y) if b]
        table = self.table
        if ctx.k == 1:
            p = ctx.p
            out = [0] * self.n
            for i, a in xs:
                for j, b in ys:
                    t = table.get((i, j))
                    if t:
                        ab = a * b
                        for k, c in t:
                            out[k] += ab * c
            return [v % p for v in out]
        out = [0] * self.n
        mul, add = ctx.mul, ctx.add
        for i, a in xs:
            for j, b in ys:
                t = table.get((i, j))
                if t:
                    ab = mul(a, b)
                    for k, c in t:
                        out[k] = add(out[k], mul(ab, c))
        return out

    def bracket_basis(self, i: int, j: int) -> list[int]:
        out = self.zero()
        for k, c in self.table.get((i, j), ()):
            out[k] = c
        return out

    def square_basis(self, i: int) -> list[int]:
        out = self.zero()
        for k, c in self.squares.get(i, ()):
            out[k] = c
        return out

    def square(self, x: Sequence[int]) -> list[int]:
        """x^2 for purely odd x (p=2), by polarization of the squares table."""
        if self.p != 2:
            raise WrongCharacteristic("squares are stored only in characteristic 2")
        if self.parity_of(x) == 0 and any(x):
            raise NotOdd("squaring is defined on odd elements")
        if self.parity_of(x) is None:
            raise NotOdd("squaring is defined on odd elements, got a mixed one")
        ctx = self.ctx
        out = self.zero()
        nz = [(i, a) for i, a in enumerate(x) if a]
        for i, a in nz:
            a2 = ctx.mul(a, a)
            for k, c in self.squares.get(i, ()):
                out[k] = ctx.add(out[k], ctx.mul(a2, c))
        for u in range(len(nz)):
            i, a = nz[u]
            for w in range(u + 1, len(nz)):
                j, b = nz[w]
                ab = ctx.mul(a, b)
                for k, c in self.table.get((i, j), ()):
                    out[k] = ctx.add(out[k], ctx.mul(ab, c))
        return out

    def half_bracket_square(self, x: Sequence[int]) -> list[int]:
        """x^2 := [x, x]/2 for odd x when p > 2."""
        if self.p == 2:
            return self.square(x)
        return scale(self.ctx, self.ctx.inv(2 % self.p), self.bracket(x, x))

    # -- adjoint operators -----------------------------------------------------------
    def ad_basis(self, i: int) -> list[list[int]]:
        """Matrix of ad(b_i) as rows: entry [k][j] = coefficient of b_k in [b_i, b_j]."""
        m = self._ad.get(i)
        if m is None:
            m = [[0] * self.n for _ in range(self.n)]
            for j in range(self.n):
                for k, c in self.table.get((i, j), ()):
                    m[k][j] = c
            self._ad[i] = m
        return m

    def ad(self, x: Sequence[int]) -> list[list[int]]:
        out = [[0] * self.n for _ in range(self.n)]
        for i, a in enumerate(x):
            if a:
                m = self.ad_basis(i)
                out = [axpy(self.ctx, a, r, o) for r, o in zip(m, out)]
        return out

    def ad_columns_packed(self, i: int) -> list[int]:
        """GF(2) only: column j of ad(b_i) packed into an int."""
        cols = self._ad_packed.get(i)
        if cols is None:
            cols = []
            for j in range(self.n):
                v = 0
                for k, c in self.table.get((i, j), ()):
                    if c:
                        v |= 1 << k
                cols.append(v)
            self._ad_packed[i] = cols
        return cols

    def is_abelian(self) -> bool:
        return not self.table and not any(self.squares.values())

    def sign(self, i: int, j: int) -> int:
        """(-1)^{p(i)p(j)} as a field element."""
        return self.ctx.neg(1) if self.parity[i] and self.parity[j] else 1

    def grading_of(self, v: Sequence[int]) -> int | None:
        if self.grading is None:
            return None
        degs = {self.grading[i] for i, c in enumerate(v) if c}
        return degs.pop() if len(degs) == 1 else None

    def __repr__(self) -> str:
        return f"SuperAlgebra(dim={self.dim_even}|{self.dim_odd} over GF({self.ctx.p}^{self.ctx.k}))"


class Element:
    """A vector of a given algebra with arithmetic and bracket operators."""

    __slots__ = ("alg", "coeffs")

    def __init__(self, alg: SuperAlgebra, coeffs: Sequence[int]):
        if len(coeffs) != alg.n:
            raise BadDimensions(f"{len(coeffs)} coefficients for a {alg.n}-dimensional algebra")
        self.alg = alg
        self.coeffs = list(coeffs)

    @property
    def parity(self) -> str:
        s = self.alg.parity_of(self.coeffs)
        return "mixed" if s is None else ("odd" if s else "even")

    def __add__(self, other: "Element") -> "Element":
        return Element(self.alg, axpy(self.alg.ctx, 1, other.coeffs, self.coeffs))

    def __sub__(self, other: "Element") -> "Element":
        return Element(self.alg, axpy(self.alg.ctx, self.alg.ctx.neg(1), other.coeffs, self.coeffs))

    def __rmul__(self, c: int) -> "Element":
        return Element(self.alg, scale(self.alg.ctx, self.alg.ctx.parse(c) if not isinstance(c, int) else c, self.coeffs))

    def bracket(self, other: "Element") -> "Element":
        return Element(self.alg, self.alg.bracket(self.coeffs, other.coeffs))

    def square(self) -> "Element":
        return Element(self.alg, self.alg.square(self.coeffs))

    def __eq__(self, other) -> bool:
        return isinstance(other, Element) and other.alg is self.alg and other.coeffs == self.coeffs

    def __repr__(self) -> str:
        return self.alg.format(self.coeffs)


# -- construction ------------------------------------------------------------------------

def algebra_from_constants(ctx: FieldCtx, names: Sequence[str], parity: Sequence[int],
                           brackets: Iterable, squares: Mapping | Iterable | None = None,
                           grading: Sequence[int] | None = None, meta: Mapping | None = None,
                           check_grading: bool = True) -> SuperAlgebra:
    """Build an algebra from bracket entries ``(i, j, value)``.

    Missing mirror entries [b_j, b_i] are filled in by (super)symmetry; entries
    given for both orders must agree.  Jacobi is not checked here.
    """
    n = len(names)
    if len(parity) != n or (grading is not None and len(grading) != n):
        raise BadDimensions("names, parities and grading must have equal length")
    if len(set(names)) != n:
        raise BadDimensions("basis names must be distinct")
    if any(s not in (0, 1) for s in parity):
        raise BadDimensions("parities must be 0 or 1")
    p = ctx.p
    neg = ctx.neg
    table: dict[tuple[int, int], Sparse] = {}
    given: dict[tuple[int, int], Sparse] = {}
    for entry in brackets:
        i, j, value = entry
        i, j = int(i), int(j)
        if not (0 <= i < n and 0 <= j < n):
            raise BadDimensions(f"bracket index ({i}, {j}) out of range")
        sv = _sparse_from(ctx, value, n)
        if (i, j) in given and given[(i, j)] != sv:
            raise SymmetryViolation(f"conflicting entries for [{names[i]}, {names[j]}]")
        given[(i, j)] = sv
    for (i, j), sv in given.items():
        if i == j and sv and (p == 2 or parity[i] == 0):
            raise SymmetryViolation(f"[{names[i]}, {names[i]}] must vanish")
        both_odd = parity[i] == 1 and parity[j] == 1
        # [y, x] = -(-1)^{p(x)p(y)} [x, y]; sign-free when p = 2
        factor = 1 if (p == 2 or both_odd) else neg(1)
        mirror = tuple((k, ctx.mul(factor, c)) for k, c in sv)
        if (j, i) in given and given[(j, i)] != mirror:
            raise SymmetryViolation(f"[{names[i]}, {names[j]}] and [{names[j]}, {names[i]}] disagree")
        target = (parity[i] + parity[j]) % 2
        for k, _ in sv:
            if parity[k] != target:
                raise ParityViolation(f"[{names[i]}, {names[j]}] has a component along {names[k]} of the wrong parity")
        if sv:
            table[(i, j)] = sv
            if i != j:
                table[(j, i)] = mirror
    sq: dict[int, Sparse] = {}
    if squares:
        if p != 2:
            raise WrongCharacteristic("a squares table is only allowed in characteristic 2")
        items = squares.items() if isinstance(squares, Mapping) else squares
        for i, value in items:
            i = int(i)
            if parity[i] != 1:
                raise ParityViolation(f"square given for even basis vector {names[i]}")
            sv = _sparse_from(ctx, value, n)
            for k, _ in sv:
                if parity[k] != 0:
                    raise ParityViolation(f"square of {names[i]} has an odd component")
            if sv:
                sq[i] = sv
    alg = SuperAlgebra(ctx, names, parity, table, sq, grading, meta)
    if grading is not None and check_grading:
        bad = grading_violations(alg)
        if bad:
            raise IncompatibleGrading(f"grading violated by {bad[0]}")
    return alg


def algebra_from_dense(ctx: FieldCtx, names: Sequence[str], parity: Sequence[int], bracket_fn,
                       square_fn=None, grading=None, meta=None) -> SuperAlgebra:
    """Build from callables returning dense vectors for basis index pairs."""
    n = len(names)
    entries = []
    for i in range(n):
        for j in range(i, n):
            if i == j and (ctx.p == 2 or parity[i] == 0):
                continue
            v = bracket_fn(i, j)
            if any(v):
                entries.append((i, j, v))
    squares = None
    if square_fn is not None and ctx.p == 2:
        squares = {}
        for i in range(n):
            if parity[i]:
                v = square_fn(i)
                if any(v):
                    squares[i] = v
    return algebra_from_constants(ctx, names, parity, entries, squares, grading, meta)


def grading_violations(g: SuperAlgebra) -> list[str]:
    out = []
    if g.grading is None:
        return out
    deg = g.grading
    for (i, j), sv in g.table.items():
        for k, _ in sv:
            if deg[k] != deg[i] + deg[j]:
                out.append(f"[{g.names[i]}, {g.names[j]}] -> {g.names[k]}")
    for i, sv in g.squares.items():
        for k, _ in sv:
            if deg[k] != 2 * deg[i]:
                out.append(f"{g.names[i]}^2 -> {g.names[k]}")
    return out


# -- axioms --------------------------------------------------------------------------------

@dataclass
class AxiomReport:
    violations: list[tuple] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def check_axioms(g: SuperAlgebra, samples: int = 16, stop_after: int | None = None) -> AxiomReport:
    """Jacobi over all ordered basis triples, plus the p=2 squaring axiom.

    Jacobi is checked in Leibniz form
    [x,[y,z]] = [[x,y],z] + (-1)^{p(x)p(y)} [y,[x,z]].
    Each violation is a tuple (kind, names..., residual).
    """
    ctx = g.ctx
    n = g.n
    report = AxiomReport()
    brk = {}
    for (i, j), sv in g.table.items():
        v = [0] * n
        for k, c in sv:
            v[k] = c
        brk[(i, j)] = v
    zero = [0] * n

    def b(i, j):
        return brk.get((i, j), zero)

    neg1 = ctx.neg(1)
    for x in range(n):
        adx = g.ad_basis(x)
        for y in range(n):
            xy = b(x, y)
            for z in range(n):
                # [x,[y,z]]
                yz = b(y, z)
                lhs = _apply_rows(ctx, adx, yz) if any(yz) else zero
                rhs = g.bracket(xy, unit(n, z)) if any(xy) else zero
                xz = b(x, z)
                if any(xz):
                    t = g.bracket(unit(n, y), xz)
                    s = neg1 if g.parity[x] and g.parity[y] else 1
                    rhs = axpy(ctx, s, t, rhs)
                if lhs != rhs:
                    report.violations.append(("jacobi", g.names[x], g.names[y], g.names[z],
                                              axpy(ctx, neg1, rhs, lhs)))
                    if stop_after and len(report.violations) >= stop_after:
                        return report
    if g.p == 2:
        for x in g.odd:
            sq = g.square_basis(x)
            adsq = g.ad(sq)
            adx = g.ad_basis(x)
            for y in range(n):
                lhs = [r[y] for r in adsq]
                inner = [r[y] for r in adx]
                rhs = _apply_rows(ctx, adx, inner)
                if lhs != rhs:
                    report.violations.append(("square", g.names[x], g.names[y], axpy(ctx, neg1, rhs, lhs)))
                    if stop_after and len(report.violations) >= stop_after:
                        return report
        # consistency of the polarization expansion on sampled odd elements
        rng = random.Random(0)
        odd = g.odd
        if odd:
            for _ in range(samples):
                u = g.zero()
                w = g.zero()
                for i in odd:
                    u[i] = rng.randrange(ctx.order)
                    w[i] = rng.randrange(ctx.order)
                lam = rng.randrange(1, ctx.order)
                lhs = g.square(scale(ctx, lam, u))
                rhs = scale(ctx, ctx.mul(lam, lam), g.square(u))
                if lhs != rhs:
                    report.violations.append(("scalar-law", g.format(u), ctx.format(lam), axpy(ctx, neg1, rhs, lhs)))
                s_sum = g.square(axpy(ctx, 1, u, w))
                expect = axpy(ctx, 1, g.bracket(u, w), axpy(ctx, 1, g.square(u), g.square(w)))
                if s_sum != expect:
                    report.violations.append(("polarization", g.format(u), g.format(w), axpy(ctx, neg1, expect, s_sum)))
    elif g.p == 3 and g.odd:
        # [x,[x,x]] = 0 for odd x is an extra axiom in characteristic 3; check
        # every coefficient of the cubic form
        odd = g.odd
        for a in range(len(odd)):
            for bb in range(a, len(odd)):
                for c in range(bb, len(odd)):
                    i, j, k = odd[a], odd[bb], odd[c]
                    perms = {(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)}
                    acc = g.zero()
                    for (u, v, w) in perms:
                        acc = axpy(ctx, 1, g.bracket(unit(n, u), b(v, w)), acc)
                    if any(acc):
                        report.violations.append(("cubic", g.names[i], g.names[j], g.names[k], acc))
    return report


def _apply_rows(ctx: FieldCtx, m: list[list[int]], v: Sequence[int]) -> list[int]:
    """m * v for a row-list matrix."""
    out = [0] * len(m)
    nz = [(j, a) for j, a in enumerate(v) if a]
    if ctx.k == 1:
        p = ctx.p
        for r, row in enumerate(m):
            s = 0
            for j, a in nz:
                if row[j]:
                    s += row[j] * a
            out[r] = s % p
        return out
    for r, row in enumerate(m):
        s = 0
        for j, a in nz:
            if row[j]:
                s = ctx.add(s, ctx.mul(row[j], a))
        out[r] = s
    return out


def apply_matrix(ctx: FieldCtx, m: list[list[int]], v: Sequence[int]) -> list[int]:
    return _apply_rows(ctx, m, v)


# -- subspaces of an algebra -------------------------------------------------------------

def is_homogeneous_space(g: SuperAlgebra, U: Subspace) -> bool:
    return all(g.parity_of(v) is not None for v in U.basis)


def homogeneous_closure(g: SuperAlgebra, vectors: Iterable[Sequence[int]]) -> list[list[int]]:
    out = []
    for v in vectors:
        ev, od = g.split_parity(v)
        if any(ev):
            out.append(ev)
        if any(od):
            out.append(od)
    return out


def _spin(g: SuperAlgebra, seeds: Iterable[Sequence[int]], with_squares: bool,
          homogeneous: bool = True, limit_rounds: int | None = None) -> Echelon:
    """Closure of span(seeds) under ad(g) (and squares of odd vectors)."""
    ctx = g.ctx
    seeds = homogeneous_closure(g, seeds) if homogeneous else [list(s) for s in seeds]
    ech = Echelon(ctx, g.n)
    frontier = []
    for s in seeds:
        r = ech.add(s)
        if r is not None:
            frontier.append(r)
    squares = with_squares and g.p == 2 and g.odd
    gf2 = ctx.p == 2 and ctx.k == 1
    rounds = 0
    while frontier:
        rounds += 1
        if rounds > max(ROUND_CAP, g.n + 1) and limit_rounds is None:
            raise IterationCapExceeded("spin did not stabilize")
        new = []
        for v in frontier:
            if gf2:
                bits = pack(v)
                idx = [j for j in range(g.n) if (bits >> j) & 1]
                for i in range(g.n):
                    cols = g.ad_columns_packed(i)
                    w = 0
                    for j in idx:
                        w ^= cols[j]
                    if w:
                        r = ech.add(unpack(w, g.n))
                        if r is not None:
                            new.append(r)
            else:
                for i in range(g.n):
                    w = apply_matrix(ctx, g.ad_basis(i), v)
                    if any(w):
                        r = ech.add(w)
                        if r is not None:
                            new.append(r)
            if squares and g.parity_of(v) == 1:
                r = ech.add(g.square(v))
                if r is not None:
                    new.append(r)
        frontier = new
    return ech


def spin_ideal(g: SuperAlgebra, seed, squaring_closed: bool = True) -> Subspace:
    """Smallest homogeneous ideal containing the seed vectors.

    For p=2 the ideal is also closed under squares of its odd elements unless
    ``squaring_closed`` is False (bracket-only ideals).
    """
    vectors = seed.basis if isinstance(seed, Subspace) else list(seed)
    return _spin(g, vectors, squaring_closed).subspace()


def spin_module(g: SuperAlgebra, seed, homogeneous: bool = False) -> Subspace:
    """Submodule of the adjoint module generated by seed (no parity splitting)."""
    vectors = seed.basis if isinstance(seed, Subspace) else list(seed)
    return _spin(g, vectors, False, homogeneous=homogeneous).subspace()


def is_ideal(g: SuperAlgebra, I: Subspace, squaring_closed: bool = True) -> bool:
    if not is_homogeneous_space(g, I):
        return False
    for v in I.basis:
        for i in range(g.n):
            if not I.contains(apply_matrix(g.ctx, g.ad_basis(i), v)):
                return False
        if squaring_closed and g.p == 2 and g.parity_of(v) == 1 and any(v):
            if not I.contains(g.square(v)):
                return False
    return True


def bracket_span(g: SuperAlgebra, U: Subspace, V: Subspace) -> Subspace:
    vecs = [g.bracket(u, v) for u in U.basis for v in V.basis]
    return Subspace(g.ctx, g.n, vecs)


def odd_squares_span(g: SuperAlgebra, U: Subspace) -> Subspace:
    """span{x^2 : x in U_odd} modulo brackets: squares of a basis of U_odd."""
    if g.p != 2:
        return Subspace.zero(g.ctx, g.n)
    vecs = [g.square(v) for v in U.basis if any(v) and g.parity_of(v) == 1]
    return Subspace(g.ctx, g.n, vecs)


def derived_step(g: SuperAlgebra, U: Subspace) -> Subspace:
    """[U, U] + span{x^2 : x in U_odd} (the squares term only for p=2)."""
    vecs = [g.bracket(u, v) for a, u in enumerate(U.basis) for v in U.basis[a:]]
    if g.p == 2:
        vecs += [g.square(v) for v in U.basis if g.parity_of(v) == 1]
    return Subspace(g.ctx, g.n, vecs)


def derived_series(g: SuperAlgebra, cap: int | None = None) -> list[Subspace]:
    """[g^(0), g^(1), ...] up to and including the first repeated term."""
    series = [Subspace.full(g.ctx, g.n)]
    limit = cap if cap is not None else g.n + 1
    while len(series) <= limit:
        nxt = derived_step(g, series[-1])
        series.append(nxt)
        if nxt == series[-2]:
            break
    return series


def derived(g: SuperAlgebra, i: int | None) -> Subspace:
    """g^(i); ``i=None`` means the stable term g^(infinity)."""
    if i is None:
        return derived_series(g)[-1]
    U = Subspace.full(g.ctx, g.n)
    for _ in range(i):
        nxt = derived_step(g, U)
        if nxt == U:
            break
        U = nxt
    return U


def centralizer(g: SuperAlgebra, U: Subspace) -> Subspace:
    """{v : [u, v] = 0 for all u in U}."""
    rows = []
    for u in U.basis:
        rows.extend(g.ad(u))
    if not rows:
        return Subspace.full(g.ctx, g.n)
    return Subspace(g.ctx, g.n, kernel_rows(g.ctx, rows, g.n))


def center(g: SuperAlgebra) -> Subspace:
    rows = []
    for i in range(g.n):
        rows.extend(g.ad_basis(i))
    if not rows:
        return Subspace.full(g.ctx, g.n)
    return Subspace(g.ctx, g.n, kernel_rows(g.ctx, rows, g.n))


def _name_for(g: SuperAlgebra, v: Sequence[int], fallback: str) -> str:
    terms = [(i, c) for i, c in enumerate(v) if c]
    if len(terms) == 1 and terms[0][1] == 1:
        return g.names[terms[0][0]]
    if len(terms) <= 3:
        return "+".join((g.names[i] if c == 1 else f"{g.ctx.format(c)}*{g.names[i]}") for i, c in terms)
    return fallback


def subalgebra(g: SuperAlgebra, U: Subspace, names: Sequence[str] | None = None) -> SuperAlgebra:
    """Induced algebra on a homogeneous subalgebra U (basis = RREF rows of U)."""
    basis = U.basis
    parity = []
    for v in basis:
        s = g.parity_of(v)
        if s is None:
            raise ParityViolation("subalgebra basis is not homogeneous")
        parity.append(s)
    if names is None:
        names = [_name_for(g, v, f"u{t}") for t, v in enumerate(basis)]
        if len(set(names)) != len(names):
            names = [f"u{t}" for t in range(len(basis))]

    def coords(w):
        c = U.coordinates(w)
        if c is None:
            raise NotAnIdeal("subspace is not closed under the bracket")
        return c

    grading = None
    if g.grading is not None:
        degs = [g.grading_of(v) for v in basis]
        if all(d is not None for d in degs):
            grading = degs
    entries = []
    m = len(basis)
    for a in range(m):
        for b in range(a, m):
            if a == b and (g.p == 2 or parity[a] == 0):
                continue
            w = g.bracket(basis[a], basis[b])
            if any(w):
                entries.append((a, b, coords(w)))
    squares = None
    if g.p == 2:
        squares = {a: coords(g.square(basis[a])) for a in range(m) if parity[a] == 1}
    return algebra_from_constants(g.ctx, names, parity, entries, squares, grading, dict(g.meta))


def quotient(g: SuperAlgebra, I: Subspace, squaring_closed: bool = True):
    """(g/I, projection) with g/I on the complement basis of standard vectors."""
    if not is_ideal(g, I, squaring_closed):
        raise NotAnIdeal("subspace is not an ideal")
    keep = [j for j in range(g.n) if j not in set(I.pivots)]
    pos = {j: t for t, j in enumerate(keep)}

    def project(v):
        r = I.reduce(v)
        return [r[j] for j in keep]

    names = [g.names[j] for j in keep]
    parity = [g.parity[j] for j in keep]
    grading = None
    if g.grading is not None and all(g.grading_of(v) is not None for v in I.basis):
        grading = [g.grading[j] for j in keep]
    entries = []
    for a, i in enumerate(keep):
        for b in range(a, len(keep)):
            j = keep[b]
            if a == b and (g.p == 2 or parity[a] == 0):
                continue
            w = project(g.bracket_basis(i, j))
            if any(w):
                entries.append((a, b, w))
    squares = None
    if g.p == 2:
        squares = {pos[i]: project(g.square_basis(i)) for i in keep if g.parity[i] == 1}
    q = algebra_from_constants(g.ctx, names, parity, entries, squares, grading, dict(g.meta))
    return q, project


def grade_mod2(g: SuperAlgebra) -> list[int]:
    """Z-degrees reduced mod 2 (0 for the '+' part, 1 for the '-' part)."""
    if g.grading is None:
        raise NoGrading("algebra carries no Z-grading")
    bad = grading_violations(g)
    if bad:
        raise IncompatibleGrading(f"grading violated by {bad[0]}")
    return [d % 2 for d in g.grading]


def check_split(g: SuperAlgebra, split: Sequence[int]) -> list[str]:
    """Violations of [g_s, g_t] in g_{s+t} for a Z/2 tag vector."""
    out = []
    if len(split) != g.n:
        return ["split has wrong length"]
    for (i, j), sv in g.table.items():
        for k, _ in sv:
            if split[k] != (split[i] + split[j]) % 2:
                out.append(f"[{g.names[i]}, {g.names[j]}] -> {g.names[k]}")
    for i, sv in g.squares.items():
        for k, _ in sv:
            if split[k] != 0:
                out.append(f"{g.names[i]}^2 -> {g.names[k]}")
    return out


# -- simplicity -----------------------------------------------------------------------------

@dataclass
class SimplicityVerdict:
    simple: bool
    method: str
    ideal: Subspace | None = None
    probabilistic: bool = False
    trace: list = field(default_factory=list)
    exhaustive: bool = False

    def __bool__(self) -> bool:
        return self.simple


def default_seed() -> int:
    return int(os.environ.get("LIEFORGE_SEED", "0"))


def _random_algebra_element(ctx, gens, rng, n):
    """Random element of the associative algebra generated by ``gens``."""
    # a random linear combination of random short words
    acc = [[0] * n for _ in range(n)]
    for _ in range(3):
        word = None
        for _ in range(rng.randint(1, 3)):
            m = gens[rng.randrange(len(gens))]
            word = m if word is None else mat_mul(ctx, word, m, n)
        c = rng.randrange(1, ctx.order)
        acc = [axpy(ctx, c, r, a) for r, a in zip(word, acc)]
    return acc


def _projective_points(ctx: FieldCtx, basis: list[list[int]], n: int, cap: int):
    """Nonzero vectors of span(basis) up to scalars; None if more than cap."""
    d = len(basis)
    q = ctx.order
    total = (q ** d - 1) // (q - 1) if d else 0
    if total > cap:
        return None
    out = []
    for lead in range(d):
        # coefficient vectors with first nonzero entry 1 at position lead
        for tail in range(q ** (d - lead - 1)):
            coeffs = [0] * lead + [1]
            t = tail
            for _ in range(d - lead - 1):
                t, r = divmod(t, q)
                coeffs.append(r)
            out.append(lin_comb(ctx, coeffs, basis, n))
    return out


def is_simple(g: SuperAlgebra, seed: int | None = None, tries: int = 200,
              exhaustive: bool | str = "auto", squaring_closed: bool = True,
              exhaustive_cap: int = 1 << 17) -> SimplicityVerdict:
    """Decide simplicity (no proper nonzero homogeneous ideal; nonabelian).

    Randomized MeatAxe on the adjoint module: kernel vectors of random
    elements of the enveloping algebra are spun to ideals, and Norton's dual
    test certifies irreducibility.  For p=2 superalgebras an ad-submodule may
    fail to be squaring-closed, so reducibility alone does not refute
    simplicity; then a seed exhaustion over all homogeneous vectors (up to
    scalars) decides exactly when the number of seeds is at most
    ``exhaustive_cap``.
    """
    ctx = g.ctx
    n = g.n
    rng = random.Random(default_seed() if seed is None else seed)
    if n == 0 or g.is_abelian():
        return SimplicityVerdict(False, "abelian")
    z = center(g)
    if z.dim:
        return SimplicityVerdict(False, "center", ideal=z if z.dim < n else None)

    def ideal_of(vectors):
        return _spin(g, vectors, squaring_closed).subspace()

    gens = [g.ad_basis(i) for i in range(n)]
    if g.dim_odd and g.dim_even:
        gens.append([[1 if (i == j and g.parity[i] == 0) else 0 for j in range(n)] for i in range(n)])
    gens_t = [[list(c) for c in zip(*m)] for m in gens]
    trace = []
    module_reducible = False
    for attempt in range(tries):
        theta = _random_algebra_element(ctx, gens, rng, n)
        ker = kernel_rows(ctx, theta, n)
        if not ker or len(ker) > 6:
            continue
        pts = _projective_points(ctx, ker, n, 4096)
        if pts is None:
            continue
        trace.append({"attempt": attempt, "nullity": len(ker)})
        module_full = True
        for v in pts:
            I = ideal_of([v])
            if I.dim < n:
                return SimplicityVerdict(False, "proper-ideal", ideal=I, trace=trace)
            if spin_module(g, [v]).dim < n:
                module_full = False
        if not module_full:
            # a proper submodule that generates g as an ideal: Norton cannot
            # certify anything, only exhaustion can
            module_reducible = True
            break
        # Norton dual test on the transposed action
        ker_t = kernel_rows(ctx, [list(c) for c in zip(*theta)], n)
        pts_t = _projective_points(ctx, ker_t, n, 4096)
        if pts_t is None:
            continue
        dual_full = True
        for w in pts_t:
            W = _spin_with(ctx, gens_t, [w], n)
            if W.dim < n:
                dual_full = False
                # annihilator of W is a proper submodule of g
                U = Subspace(ctx, n, kernel_rows(ctx, W.basis, n))
                I = ideal_of(U.basis)
                if I.dim < n:
                    return SimplicityVerdict(False, "proper-ideal", ideal=I, trace=trace)
                module_reducible = True
                break
        if module_reducible:
            break
        if dual_full:
            if exhaustive is True:
                confirm = _exhaust_seeds(g, squaring_closed, exhaustive_cap)
                if confirm is not None:
                    if not confirm.simple:
                        raise IterationCapExceeded("Norton certificate contradicted by seed exhaustion")
                    return SimplicityVerdict(True, "norton+exhaustive", trace=trace, exhaustive=True)
            return SimplicityVerdict(True, "norton", trace=trace)
    # fall back to exhausting homogeneous seeds
    trace.append({"module_reducible": module_reducible})
    do_exhaust = exhaustive is True or exhaustive == "auto"
    if do_exhaust:
        verdict = _exhaust_seeds(g, squaring_closed, exhaustive_cap)
        if verdict is not None:
            verdict.trace = trace
            return verdict
    # basis seeds only: no proper ideal found, verdict stays probabilistic
    for i in range(n):
        I = ideal_of([g.basis(i)])
        if I.dim < n:
            return SimplicityVerdict(False, "proper-ideal", ideal=I, trace=trace)
    return SimplicityVerdict(True, "probabilistic", probabilistic=True, trace=trace)


def _spin_with(ctx: FieldCtx, mats, seeds, n) -> Subspace:
    ech = Echelon(ctx, n)
    frontier = [r for r in (ech.add(s) for s in seeds) if r is not None]
    while frontier:
        new = []
        for v in frontier:
            for m in mats:
                w = apply_matrix(ctx, m, v)
                if any(w):
                    r = ech.add(w)
                    if r is not None:
                        new.append(r)
        frontier = new
    return ech.subspace()


def count_homogeneous_seeds(g: SuperAlgebra) -> int:
    q = g.ctx.order
    return sum((q ** d - 1) // (q - 1) for d in (g.dim_even, g.dim_odd) if d)


def _exhaust_seeds(g: SuperAlgebra, squaring_closed: bool, cap: int) -> SimplicityVerdict | None:
    """Exact check that every nonzero homogeneous vector generates g.

    If w = [b_i, v] is nonzero then ideal(w) is inside ideal(v), so a vector
    whose chain of images reaches a known generator is itself a generator;
    only the ends of the chains (cycles) are spun directly.
    """
    ctx = g.ctx
    n = g.n
    if count_homogeneous_seeds(g) > cap:
        return None
    good: set[tuple] = set()

    def normalize(v):
        lead = next(c for c in v if c)
        return tuple(v) if lead == 1 else tuple(scale(ctx, ctx.inv(lead), v))

    def ideal_full(v):
        return _spin(g, [list(v)], squaring_closed).subspace().dim == n

    for part in (g.even, g.odd):
        d = len(part)
        if not d:
            continue
        basis = [g.basis(i) for i in part]
        pts = _projective_points(ctx, basis, n, cap)
        for v in pts:
            key = normalize(v)
            if key in good:
                continue
            chain = [key]
            on_chain = {key}
            cur = key
            while True:
                nxt = None
                for i in range(n):
                    w = apply_matrix(ctx, g.ad_basis(i), cur)
                    if any(w):
                        nxt = normalize(w)
                        break
                if nxt is None:
                    # central vector (cannot happen when the center is 0)
                    I = _spin(g, [list(cur)], squaring_closed).subspace()
                    return SimplicityVerdict(False, "proper-ideal", ideal=I, exhaustive=True)
                if nxt in good:
                    break
                if nxt in on_chain:
                    if not ideal_full(nxt):
                        I = _spin(g, [list(nxt)], squaring_closed).subspace()
                        return SimplicityVerdict(False, "proper-ideal", ideal=I, exhaustive=True)
                    good.add(nxt)
                    break
                chain.append(nxt)
                on_chain.add(nxt)
                cur = nxt
            # the end of the chain is known to generate g, hence so does every link
            good.update(chain)
    return SimplicityVerdict(True, "exhaustive", exhaustive=True)
