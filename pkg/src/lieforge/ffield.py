"""Arithmetic in GF(p^k) for p in {2, 3, 5} and 1 <= k <= 8.

Elements are stored as plain ints: the coefficient vector ``(c_0, ..., c_{k-1})``
of ``c_0 + c_1 x + ... + c_{k-1} x^{k-1}`` read as base-``p`` digits.  The
int form is what the linear algebra layer works with; :class:`FieldElement`
wraps it with operators for interactive use.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import DivisionByZero, MixedFields, NotPrime, OrderTooLarge, ReducibleModulus

SUPPORTED_PRIMES = (2, 3, 5)
MAX_ORDER = 1 << 16


def _poly_mulmod(a: Sequence[int], b: Sequence[int], modulus: Sequence[int], p: int) -> list[int]:
    """Product of coefficient lists reduced by a monic modulus (low degree first)."""
    k = len(modulus) - 1
    prod = [0] * (len(a) + len(b) - 1 if a and b else 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    for d in range(len(prod) - 1, k - 1, -1):
        c = prod[d]
        if c:
            for t in range(k + 1):
                prod[d - k + t] = (prod[d - k + t] - c * modulus[t]) % p
    out = prod[:k]
    return out + [0] * (k - len(out))


def _has_root_free_factor(modulus: Sequence[int], p: int) -> bool:
    """True iff the monic polynomial factors over GF(p); plain trial division."""
    k = len(modulus) - 1
    for d in range(1, k // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            divisor = list(tail) + [1]
            if _poly_rem(modulus, divisor, p) == [0] * d:
                return True
    return False


def _poly_rem(num: Sequence[int], den: Sequence[int], p: int) -> list[int]:
    num = list(num)
    d = len(den) - 1
    inv_lead = pow(den[-1], p - 2, p)
    for i in range(len(num) - 1, d - 1, -1):
        c = num[i] * inv_lead % p
        if c:
            for t in range(d + 1):
                num[i - d + t] = (num[i - d + t] - c * den[t]) % p
    return num[:d]


def is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Irreducibility of a monic polynomial over GF(p) by exhaustion."""
    if len(modulus) < 2 or modulus[-1] % p != 1:
        return False
    return not _has_root_free_factor([c % p for c in modulus], p)


def default_modulus(p: int, k: int) -> list[int]:
    """Lexicographically smallest irreducible monic polynomial of degree k.

    Candidates are ordered by their coefficient list from the leading term
    down, so for p=2, k=2 the answer is x^2+x+1.
    """
    if k == 1:
        return [0, 1]
    for high_to_low in itertools.product(range(p), repeat=k):
        cand = list(reversed(high_to_low)) + [1]
        if cand[0] and is_irreducible(cand, p):
            return cand
    raise ReducibleModulus(f"no irreducible polynomial of degree {k} over GF({p})")


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, int(n ** 0.5) + 1))


class FieldCtx:
    """GF(p^k) with a fixed modulus.  Immutable once built."""

    __slots__ = ("p", "k", "modulus", "order", "_exp", "_log", "_add", "_neg", "_frob", "_digits")

    def __init__(self, p: int, k: int = 1, modulus: Sequence[int] | None = None):
        if not _is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if p not in SUPPORTED_PRIMES:
            raise NotPrime(f"characteristic {p} not supported (use one of {SUPPORTED_PRIMES})")
        if not 1 <= k <= 8:
            raise OrderTooLarge(f"extension degree {k} outside 1..8")
        if p ** k > MAX_ORDER:
            raise OrderTooLarge(f"field order {p}^{k} exceeds {MAX_ORDER}")
        if k == 1:
            # modulus is irrelevant for the prime field
            mod = [0, 1]
        elif modulus is None:
            mod = default_modulus(p, k)
        else:
            mod = [int(c) % p for c in modulus]
            if len(mod) != k + 1 or mod[-1] != 1:
                raise ReducibleModulus(f"modulus must be monic of degree {k}")
            if not is_irreducible(mod, p):
                raise ReducibleModulus(f"modulus {mod} is reducible over GF({p})")
        self.p = p
        self.k = k
        self.modulus = tuple(mod)
        self.order = p ** k
        self._build_tables()

    # -- table construction -------------------------------------------------
    def _build_tables(self) -> None:
        p, q = self.p, self.order
        self._digits = [self._to_digits(a) for a in range(q)]
        # find a primitive element and build exp/log tables
        for g in range(1, q):
            exp = [1]
            x = 1
            for _ in range(q - 2):
                x = self._slow_mul(x, g)
                if x == 1:
                    break
                exp.append(x)
            if len(exp) == q - 1:
                break
        else:  # q == 2
            exp = [1]
        log = [0] * q
        for i, v in enumerate(exp):
            log[v] = i
        self._exp = exp + exp  # doubled so exp[i+j] needs no reduction
        self._log = log
        if p == 2:
            self._add = None
            self._neg = list(range(q))
        else:
            self._add = [[self._slow_add(a, b) for b in range(q)] for a in range(q)] if q <= 729 else None
            self._neg = [self._from_digits([(-c) % p for c in self._digits[a]]) for a in range(q)]
        self._frob = [self.pow(a, p) for a in range(q)]

    def _to_digits(self, a: int) -> list[int]:
        out = []
        for _ in range(self.k):
            a, r = divmod(a, self.p)
            out.append(r)
        return out

    def _from_digits(self, digits: Iterable[int]) -> int:
        v = 0
        for c in reversed(list(digits)):
            v = v * self.p + c
        return v

    def _slow_add(self, a: int, b: int) -> int:
        da, db = self._digits[a], self._digits[b]
        return self._from_digits([(x + y) % self.p for x, y in zip(da, db)])

    def _slow_mul(self, a: int, b: int) -> int:
        return self._from_digits(_poly_mulmod(self._to_digits(a), self._to_digits(b), self.modulus, self.p))

    # -- int-level arithmetic (hot path) ------------------------------------
    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self.k == 1:
            return (a + b) % self.p
        if self._add is not None:
            return self._add[a][b]
        return self._slow_add(a, b)

    def neg(self, a: int) -> int:
        return self._neg[a]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self._neg[b])

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.k == 1:
            return a * b % self.p
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("inverse of zero")
        if a == 1:
            return 1
        return self._exp[(self.order - 1) - self._log[a]]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        if e == 0:
            return 1
        if a == 0:
            return 0
        return self._exp[(self._log[a] * e) % (self.order - 1)]

    def frob(self, a: int) -> int:
        """a -> a^p."""
        return self._frob[a]

    def from_int(self, n: int) -> int:
        """Image of an integer under Z -> GF(p)."""
        return n % self.p

    def elements(self) -> range:
        return range(self.order)

    def generator(self) -> int:
        """The class of x modulo the modulus (for k=1 this is 1)."""
        return self.p if self.k > 1 else 1

    def primitive(self) -> int:
        return self._exp[1] if self.order > 2 else 1

    # -- conversions --------------------------------------------------------
    def coeffs(self, a: int) -> list[int]:
        return list(self._digits[a])

    def from_coeffs(self, coeffs: Sequence[int]) -> int:
        c = [int(x) % self.p for x in coeffs]
        if len(c) > self.k:
            raise MixedFields(f"coefficient list longer than degree {self.k}")
        return self._from_digits(c + [0] * (self.k - len(c)))

    def parse(self, value) -> int:
        """Field element from an int (prime-field residue) or a coefficient list."""
        if isinstance(value, bool):
            raise TypeError("bool is not a field element")
        if isinstance(value, int):
            return value % self.p
        return self.from_coeffs(value)

    def serialize(self, a: int):
        """Inverse of :meth:`parse`: an int for the prime field, else a list."""
        return a if self.k == 1 else self.coeffs(a)

    def format(self, a: int, var: str = "a") -> str:
        if self.k == 1:
            return str(a)
        terms = []
        for i, c in enumerate(self._digits[a]):
            if not c:
                continue
            mono = "1" if i == 0 else (var if i == 1 else f"{var}^{i}")
            terms.append(mono if c == 1 and i else (str(c) if i == 0 else f"{c}{mono}"))
        return "+".join(terms) if terms else "0"

    def spec(self) -> dict:
        return {"p": self.p, "k": self.k, "modulus": list(self.modulus)}

    def element(self, value) -> "FieldElement":
        return FieldElement(self, self.parse(value))

    # -- identity -----------------------------------------------------------
    def __eq__(self, other) -> bool:
        return isinstance(other, FieldCtx) and (self.p, self.k, self.modulus) == (other.p, other.k, other.modulus)

    def __hash__(self) -> int:
        return hash((self.p, self.k, self.modulus))

    def __repr__(self) -> str:
        return f"FieldCtx(p={self.p}, k={self.k}, modulus={list(self.modulus)})"


@lru_cache(maxsize=None)
def ff_make(p: int, k: int = 1, modulus: tuple | None = None) -> FieldCtx:
    """Cached constructor; ``modulus`` is a coefficient tuple, low degree first."""
    return FieldCtx(p, k, list(modulus) if modulus is not None else None)


def field_from_spec(spec: dict) -> FieldCtx:
    mod = spec.get("modulus")
    return ff_make(int(spec["p"]), int(spec.get("k", 1)), tuple(mod) if mod is not None and spec.get("k", 1) > 1 else None)


class FieldElement:
    """Value type for a field element; supports + - * / ** and ==."""

    __slots__ = ("ctx", "value")

    def __init__(self, ctx: FieldCtx, value: int):
        self.ctx = ctx
        self.value = value

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.ctx != self.ctx:
                raise MixedFields(f"{self.ctx} vs {other.ctx}")
            return other.value
        if isinstance(other, int):
            return other % self.ctx.p
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        return FieldElement(self.ctx, self.ctx.add(self.value, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return FieldElement(self.ctx, self.ctx.sub(self.value, o))

    def __rsub__(self, other):
        o = self._other(other)
        return FieldElement(self.ctx, self.ctx.sub(o, self.value))

    def __neg__(self):
        return FieldElement(self.ctx, self.ctx.neg(self.value))

    def __mul__(self, other):
        o = self._other(other)
        return FieldElement(self.ctx, self.ctx.mul(self.value, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        return FieldElement(self.ctx, self.ctx.div(self.value, o))

    def __pow__(self, e: int):
        return FieldElement(self.ctx, self.ctx.pow(self.value, e))

    def inv(self) -> "FieldElement":
        return FieldElement(self.ctx, self.ctx.inv(self.value))

    def frobenius(self) -> "FieldElement":
        return FieldElement(self.ctx, self.ctx.frob(self.value))

    def coeffs(self) -> list[int]:
        return self.ctx.coeffs(self.value)

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldElement):
            return self.ctx == other.ctx and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.ctx.p
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.ctx, self.value))

    def __bool__(self) -> bool:
        return self.value != 0

    def __repr__(self) -> str:
        return f"FieldElement({self.ctx.format(self.value)} in GF({self.ctx.p}^{self.ctx.k}))"


def ff_frobenius(a: FieldElement) -> FieldElement:
    return a.frobenius()
