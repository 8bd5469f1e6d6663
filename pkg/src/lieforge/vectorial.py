"""Divided-power algebras O(m; N | n) and vector fields on them.

A monomial is x^(a) xi_B with a a multi-index (0 <= a_i < p^N_i) and B a
set of odd indices, stored as (a, bitmask).  Products of even parts use
Lucas binomials; odd parts multiply in the exterior algebra with the sign
of the merge permutation.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

from .errors import BadParams, BadShearing
from .ffield import FieldCtx
from .superalg import SuperAlgebra, algebra_from_constants


def lucas_binomial(n: int, k: int, p: int) -> int:
    """binom(n, k) mod p, digit by digit."""
    if k < 0 or k > n:
        return 0
    out = 1
    while n or k:
        nd, kd = n % p, k % p
        if kd > nd:
            return 0
        out = out * _small_binom(nd, kd) % p
        n //= p
        k //= p
    return out


@lru_cache(maxsize=None)
def _small_binom(n: int, k: int) -> int:
    r = 1
    for i in range(k):
        r = r * (n - i) // (i + 1)
    return r


def _merge_sign(b: int, c: int) -> int:
    """Parity of the number of pairs (i in b, j in c) with i > j."""
    count = 0
    bits = b
    while bits:
        low = bits & -bits
        i = low.bit_length() - 1
        count += bin(c & ((1 << i) - 1)).count("1")
        bits ^= low
    return count & 1


class DividedPowerCtx:
    """The supercommutative algebra O(m; N | n_odd) over a finite field."""

    def __init__(self, ctx: FieldCtx, m: int, N: Sequence[int] = (), n_odd: int = 0,
                 even_names: Sequence[str] | None = None, odd_names: Sequence[str] | None = None,
                 weights: Sequence[int] | None = None, odd_weights: Sequence[int] | None = None):
        N = tuple(N) if N else (1,) * m
        if len(N) != m or any(int(x) < 1 for x in N):
            raise BadShearing(f"shearing vector {N} must have {m} entries, each >= 1")
        if n_odd < 0 or m < 0:
            raise BadParams("numbers of indeterminates must be nonnegative")
        self.ctx = ctx
        self.m = m
        self.N = N
        self.n_odd = n_odd
        self.even_names = list(even_names or [f"x{i + 1}" for i in range(m)])
        self.odd_names = list(odd_names or [f"xi{i + 1}" for i in range(n_odd)])
        self.weights = list(weights or [1] * m)
        self.odd_weights = list(odd_weights or [1] * n_odd)
        self.bounds = [ctx.p ** k for k in N]
        monos = [(a, b) for a in product(*[range(t) for t in self.bounds]) for b in range(1 << n_odd)]
        monos.sort(key=lambda mb: (self.mono_degree(mb), mb[0], bin(mb[1]).count("1"), mb[1]))
        self.monomials = monos
        self.index = {mb: i for i, mb in enumerate(monos)}
        self._mul_cache: dict[tuple[int, int], tuple[int, int] | None] = {}

    @property
    def dim(self) -> int:
        return len(self.monomials)

    @property
    def nvars(self) -> int:
        return self.m + self.n_odd

    def var_names(self) -> list[str]:
        return self.even_names + self.odd_names

    def var_parity(self, j: int) -> int:
        return 0 if j < self.m else 1

    def var_weight(self, j: int) -> int:
        return self.weights[j] if j < self.m else self.odd_weights[j - self.m]

    def mono_degree(self, mb) -> int:
        a, b = mb
        d = sum(w * x for w, x in zip(self.weights, a))
        d += sum(self.odd_weights[k] for k in range(self.n_odd) if (b >> k) & 1)
        return d

    def degree(self, i: int) -> int:
        return self.mono_degree(self.monomials[i])

    def parity(self, i: int) -> int:
        return bin(self.monomials[i][1]).count("1") & 1

    def unit_index(self) -> int:
        return self.index[((0,) * self.m, 0)]

    def top_even_index(self) -> int:
        """Index of x-bar, the product of the top divided powers of the even indeterminates."""
        return self.index[(tuple(t - 1 for t in self.bounds), 0)]

    def variable(self, j: int) -> int:
        """Index of the monomial equal to the j-th indeterminate."""
        if j < self.m:
            a = [0] * self.m
            a[j] = 1
            if self.bounds[j] < 2:
                raise BadParams("indeterminate truncated away")
            return self.index[(tuple(a), 0)]
        return self.index[((0,) * self.m, 1 << (j - self.m))]

    def name(self, i: int) -> str:
        a, b = self.monomials[i]
        parts = []
        for k, e in enumerate(a):
            if e == 1:
                parts.append(self.even_names[k])
            elif e > 1:
                parts.append(f"{self.even_names[k]}^({e})")
        for k in range(self.n_odd):
            if (b >> k) & 1:
                parts.append(self.odd_names[k])
        return "*".join(parts) if parts else "1"

    def mono_mul(self, i: int, j: int) -> tuple[int, int] | None:
        """x_i * x_j as (index, coefficient), or None when zero."""
        key = (i, j)
        if key in self._mul_cache:
            return self._mul_cache[key]
        (a, b), (c, d) = self.monomials[i], self.monomials[j]
        res = None
        if not b & d:
            s = [x + y for x, y in zip(a, c)]
            if all(x < t for x, t in zip(s, self.bounds)):
                coef = 1
                p = self.ctx.p
                for x, y in zip(a, c):
                    coef = coef * lucas_binomial(x + y, x, p) % p
                if coef:
                    if _merge_sign(b, d):
                        coef = self.ctx.neg(coef)
                    res = (self.index[(tuple(s), b | d)], coef)
        self._mul_cache[key] = res
        return res

    def mono_deriv(self, j: int, i: int) -> tuple[int, int] | None:
        """d/d(var j) of monomial i as (index, coefficient) or None."""
        a, b = self.monomials[i]
        if j < self.m:
            if a[j] == 0:
                return None
            a2 = list(a)
            a2[j] -= 1
            return self.index[(tuple(a2), b)], 1
        k = j - self.m
        if not (b >> k) & 1:
            return None
        sign = bin(b & ((1 << k) - 1)).count("1") & 1
        return self.index[(a, b & ~(1 << k))], (self.ctx.neg(1) if sign else 1)

    # sparse element helpers: dict index -> coeff
    def mul(self, u: dict, v: dict) -> dict:
        ctx = self.ctx
        out: dict[int, int] = {}
        for i, a in u.items():
            for j, b in v.items():
                r = self.mono_mul(i, j)
                if r:
                    k, c = r
                    out[k] = ctx.add(out.get(k, 0), ctx.mul(ctx.mul(a, b), c))
        return {k: c for k, c in out.items() if c}

    def deriv(self, j: int, u: dict) -> dict:
        ctx = self.ctx
        out: dict[int, int] = {}
        for i, a in u.items():
            r = self.mono_deriv(j, i)
            if r:
                k, c = r
                out[k] = ctx.add(out.get(k, 0), ctx.mul(a, c))
        return {k: c for k, c in out.items() if c}

    def element_parity(self, u: dict) -> int | None:
        ps = {self.parity(i) for i in u}
        if len(ps) > 1:
            return None
        return ps.pop() if ps else 0


def build_divided_powers(m: int, N: Sequence[int], n_odd: int, ctx: FieldCtx, **kw) -> DividedPowerCtx:
    return DividedPowerCtx(ctx, m, N, n_odd, **kw)


# -- vector fields ----------------------------------------------------------------------

class VectorFields:
    """vect(m; N | n): all f * d_j, with bracket and (p=2) squares of odd fields.

    Fields are sparse dicts keyed by basis index; basis index of f*d_j is
    monomial_index * nvars + j.
    """

    def __init__(self, dp: DividedPowerCtx):
        self.dp = dp
        self.ctx = dp.ctx
        self.nvars = dp.nvars
        self.dim = dp.dim * self.nvars
        self._br: dict[tuple[int, int], dict] = {}

    def basis_index(self, mono: int, var: int) -> int:
        return mono * self.nvars + var

    def split(self, idx: int) -> tuple[int, int]:
        return divmod(idx, self.nvars)

    def parity(self, idx: int) -> int:
        mono, var = self.split(idx)
        return (self.dp.parity(mono) + self.dp.var_parity(var)) & 1

    def degree(self, idx: int) -> int:
        mono, var = self.split(idx)
        return self.dp.degree(mono) - self.dp.var_weight(var)

    def name(self, idx: int) -> str:
        mono, var = self.split(idx)
        f = self.dp.name(mono)
        d = f"d_{self.dp.var_names()[var]}"
        return d if f == "1" else f"{f}*{d}"

    def components(self, X: dict) -> list[dict]:
        comps: list[dict] = [dict() for _ in range(self.nvars)]
        for idx, c in X.items():
            mono, var = self.split(idx)
            comps[var][mono] = c
        return comps

    def from_components(self, comps: Sequence[dict]) -> dict:
        out = {}
        for var, comp in enumerate(comps):
            for mono, c in comp.items():
                if c:
                    out[self.basis_index(mono, var)] = c
        return out

    def apply(self, X: dict, f: dict) -> dict:
        """X(f) = sum_i X_i * d_i(f)."""
        ctx = self.ctx
        out: dict[int, int] = {}
        for i, comp in enumerate(self.components(X)):
            if not comp:
                continue
            df = self.dp.deriv(i, f)
            if df:
                for k, c in self.dp.mul(comp, df).items():
                    out[k] = ctx.add(out.get(k, 0), c)
        return {k: c for k, c in out.items() if c}

    def field_parity(self, X: dict) -> int | None:
        ps = {self.parity(i) for i in X}
        if len(ps) > 1:
            return None
        return ps.pop() if ps else 0

    def bracket_basis(self, a: int, b: int) -> dict:
        key = (a, b)
        hit = self._br.get(key)
        if hit is not None:
            return hit
        res = self._bracket_homogeneous({a: 1}, {b: 1}, self.parity(a), self.parity(b))
        self._br[key] = res
        return res

    def _bracket_homogeneous(self, X: dict, Y: dict, px: int, py: int) -> dict:
        ctx = self.ctx
        xc, yc = self.components(X), self.components(Y)
        sign = 1 if (px and py) else ctx.neg(1)  # coefficient of Y(X_j)
        comps = []
        for j in range(self.nvars):
            acc: dict[int, int] = {}
            if yc[j]:
                for k, c in self.apply(X, yc[j]).items():
                    acc[k] = ctx.add(acc.get(k, 0), c)
            if xc[j]:
                for k, c in self.apply(Y, xc[j]).items():
                    acc[k] = ctx.add(acc.get(k, 0), ctx.mul(sign, c))
            comps.append({k: c for k, c in acc.items() if c})
        return self.from_components(comps)

    def bracket(self, X: dict, Y: dict) -> dict:
        ctx = self.ctx
        out: dict[int, int] = {}
        for a, ca in X.items():
            for b, cb in Y.items():
                for k, c in self.bracket_basis(a, b).items():
                    out[k] = ctx.add(out.get(k, 0), ctx.mul(ctx.mul(ca, cb), c))
        return {k: c for k, c in out.items() if c}

    def square(self, X: dict) -> dict:
        """X o X for an odd field in characteristic 2: sum_j X(X_j) d_j."""
        comps = [self.apply(X, comp) if comp else {} for comp in self.components(X)]
        return self.from_components(comps)

    def divergence(self, X: dict) -> dict:
        """sum_j (-1)^{p(X_j) p(d_j)} d_j(X_j)."""
        ctx = self.ctx
        out: dict[int, int] = {}
        for j, comp in enumerate(self.components(X)):
            for mono, c in comp.items():
                r = self.dp.mono_deriv(j, mono)
                if not r:
                    continue
                k, s = r
                if self.dp.var_parity(j) and self.dp.parity(mono):
                    s = ctx.neg(s)
                out[k] = ctx.add(out.get(k, 0), ctx.mul(c, s))
        return {k: c for k, c in out.items() if c}

    def dense(self, X: dict) -> list[int]:
        v = [0] * self.dim
        for k, c in X.items():
            v[k] = c
        return v

    def sparse(self, v: Sequence[int]) -> dict:
        return {k: c for k, c in enumerate(v) if c}

    def degree_indices(self, d: int) -> list[int]:
        return [i for i in range(self.dim) if self.degree(i) == d]

    def degrees(self) -> list[int]:
        return sorted({self.degree(i) for i in range(self.dim)})

    def algebra(self, fields: Sequence[dict] | None = None, names: Sequence[str] | None = None,
                meta: dict | None = None) -> SuperAlgebra:
        """Algebra on the span of homogeneous ``fields`` (all basis fields by default)."""
        from .linalg import CoordinateSystem

        if fields is None:
            fields = [{i: 1} for i in range(self.dim)]
            names = [self.name(i) for i in range(self.dim)]
            coords = None
        else:
            coords = CoordinateSystem(self.ctx, self.dim, [self.dense(f) for f in fields])
        parity, grading = [], []
        for f in fields:
            pf = self.field_parity(f)
            degs = {self.degree(i) for i in f}
            if pf is None or len(degs) != 1:
                raise BadParams("fields must be homogeneous in parity and degree")
            parity.append(pf)
            grading.append(degs.pop())
        if names is None:
            names = [self.describe(f) for f in fields]
            if len(set(names)) != len(names):
                names = [f"v{t}" for t in range(len(fields))]

        def to_coords(X):
            if coords is None:
                return self.dense(X)
            c = coords.coords(self.dense(X))
            if c is None:
                from .errors import NotAnIdeal
                raise NotAnIdeal("span of fields is not closed under the bracket")
            return c

        n = len(fields)
        entries = []
        for i in range(n):
            for j in range(i, n):
                if i == j and (self.ctx.p == 2 or parity[i] == 0):
                    continue
                w = self.bracket(fields[i], fields[j])
                if w:
                    entries.append((i, j, to_coords(w)))
        squares = None
        if self.ctx.p == 2:
            squares = {i: to_coords(self.square(fields[i])) for i in range(n) if parity[i]}
        alg = algebra_from_constants(self.ctx, names, parity, entries, squares, grading, meta or {})
        alg.fields = list(fields)
        alg.vector_fields = self
        return alg

    def describe(self, X: dict) -> str:
        ctx = self.ctx
        terms = []
        for k in sorted(X):
            c = X[k]
            terms.append(self.name(k) if c == 1 else f"{ctx.format(c)}*{self.name(k)}")
        return " + ".join(terms) if terms else "0"


def fields_from_span(vf: VectorFields, vectors: Iterable[Sequence[int]]) -> list[dict]:
    return [vf.sparse(v) for v in vectors]
