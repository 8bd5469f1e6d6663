"""Restrictedness: solvers and verifiers for p-maps and their variants.

A p-map is pinned down on a basis by the linear condition
ad(x^[p]) = ad(x)^p, so each solver is a batch of linear systems in the
coordinates of the unknown image.  Free variables (present exactly when the
unknowns meet the center) are set to zero.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from .errors import (
    BadSplit,
    HasCenter,
    InvalidWitness,
    IterationCapExceeded,
    MissingWitness,
    ParityViolation,
    VariantMismatch,
    WrongCharacteristic,
)
from .linalg import Echelon, axpy, kernel_rows, mat_mul, mat_pow_rows, solve_many
from .matrices import MatrixAlgebra, flat
from .superalg import ROUND_CAP, SuperAlgebra, center, check_split

VARIANTS = ("p", "p|2p", "2|2", "(2,4)", "(2,-)", "(2,4)|4")


@dataclass
class StructureWitness:
    """Images of basis vectors under the restrictedness maps.

    ``low`` holds the [p] (or [2]) images, ``high`` the [2p] (or [4]) images,
    both keyed by basis index.  ``ambiguity`` is the dimension of the
    solution space of ad z = 0 among the unknowns (the center part), so the
    tables are canonical only up to that freedom.
    """

    variant: str
    low: dict[int, list[int]]
    high: dict[int, list[int]] = field(default_factory=dict)
    split: tuple[int, ...] | None = None
    ambiguity: int = 0
    outcome: str | None = None
    has_full_two: bool | None = None
    exponent_low: int = 2
    exponent_high: int = 4

    def image(self, i: int) -> list[int]:
        return self.low[i] if i in self.low else self.high[i]

    def to_json(self, g: SuperAlgebra) -> dict:
        ctx = g.ctx

        def enc(table):
            return {g.names[i]: [ctx.serialize(c) for c in v] for i, v in sorted(table.items())}

        out = {
            "variant": self.variant,
            "low": enc(self.low),
            "high": enc(self.high),
            "ambiguity": self.ambiguity,
            "exponents": [self.exponent_low, self.exponent_high],
        }
        if self.split is not None:
            out["split"] = list(self.split)
        if self.outcome is not None:
            out["outcome"] = self.outcome
        if self.has_full_two is not None:
            out["has_full_two"] = self.has_full_two
        return out


def ad_power(g: SuperAlgebra, i: int, e: int) -> list[list[int]]:
    return mat_pow_rows(g.ctx, g.ad_basis(i), e)


def _solve_ad(g: SuperAlgebra, targets: Sequence[list[list[int]]], unknowns: Sequence[int]):
    """For each target T find z in span(unknowns) with ad z = T.

    Returns (solutions as full vectors or None, kernel dimension).
    """
    n = g.n
    ads = [g.ad_basis(k) for k in unknowns]
    rows = []
    rhs = [[] for _ in targets]
    for r in range(n):
        for c in range(n):
            rows.append([a[r][c] for a in ads])
            for t, tgt in enumerate(targets):
                rhs[t].append(tgt[r][c])
    sols = solve_many(g.ctx, rows, len(unknowns), rhs) if targets else []
    kdim = len(kernel_rows(g.ctx, rows, len(unknowns))) if unknowns else 0
    out = []
    for s in sols:
        if s is None:
            out.append(None)
            continue
        v = [0] * n
        for k, c in zip(unknowns, s):
            v[k] = c
        out.append(v)
    return out, kdim


def find_p_structure(g: SuperAlgebra) -> StructureWitness | None:
    """p-structure on a Lie algebra, or None if some basis vector has no [p]-image."""
    if g.dim_odd:
        raise ParityViolation("p-structures are for Lie algebras; use find_p2p_structure")
    p = g.p
    idx = list(range(g.n))
    sols, kdim = _solve_ad(g, [ad_power(g, i, p) for i in idx], idx)
    if any(s is None for s in sols):
        return None
    return StructureWitness("p", dict(zip(idx, sols)), ambiguity=kdim, exponent_low=p, exponent_high=2 * p)


def find_p2p_structure(g: SuperAlgebra) -> StructureWitness | None:
    """p|2p-structure: [p] on even vectors checked against the whole algebra.

    The [2p]-image of an odd x solves ad z = ad(x)^{2p}; since ad(x)^2 is
    the ad of the square of x, this is the [p]-image of x^2.
    """
    p = g.p
    ev, od = g.even, g.odd
    targets = [ad_power(g, i, p) for i in ev] + [ad_power(g, i, 2 * p) for i in od]
    sols, kdim = _solve_ad(g, targets, ev)
    if any(s is None for s in sols):
        return None
    low = dict(zip(ev, sols[:len(ev)]))
    high = dict(zip(od, sols[len(ev):]))
    variant = "p|2p" if od else "p"
    return StructureWitness(variant, low, high, ambiguity=kdim, exponent_low=p, exponent_high=2 * p)


def check_candidate(g: SuperAlgebra, images: dict[int, Sequence[int]], exponent: int | None = None,
                    against: Sequence[int] | None = None) -> list[tuple[str, str, list[int], list[int]]]:
    """Violations of [x^[e], y] = ad_x^e(y) for a proposed table.

    Each violation is (x name, y name, [x^[e], y], ad_x^e(y)).
    """
    e = exponent or g.p
    ys = range(g.n) if against is None else against
    out = []
    for i, img in sorted(images.items()):
        adimg = g.ad(img)
        power = ad_power(g, i, e)
        for y in ys:
            lhs = [r[y] for r in adimg]
            rhs = [r[y] for r in power]
            if lhs != rhs:
                out.append((g.names[i], g.names[y], lhs, rhs))
    return out


def verify_witness(g: SuperAlgebra, w: StructureWitness) -> list[tuple]:
    """Re-check every table entry on all basis vectors y."""
    if w.variant in ("p", "p|2p", "2|2"):
        bad = check_candidate(g, w.low, w.exponent_low)
        bad += check_candidate(g, w.high, w.exponent_high)
        return bad
    split = w.split
    bad = []
    for i, v in w.low.items():
        bad += check_candidate(g, {i: v}, 2)
    for i, v in w.high.items():
        bad += check_candidate(g, {i: v}, 4)
    if split is None:
        bad.append(("split", "missing", [], []))
    return bad


# -- 2|2-structure ---------------------------------------------------------------

class TwoTwoMap:
    """Total squaring x -> x^[2] on all elements, even inhomogeneous ones."""

    def __init__(self, g: SuperAlgebra, witness: StructureWitness):
        self.g = g
        self.witness = witness

    def even_part(self, e: Sequence[int]) -> list[int]:
        g, ctx = self.g, self.g.ctx
        out = g.zero()
        nz = [(i, c) for i, c in enumerate(e) if c]
        for i, c in nz:
            out = axpy(ctx, ctx.mul(c, c), self.witness.low[i], out)
        for a in range(len(nz)):
            for b in range(a + 1, len(nz)):
                (i, c), (j, d) = nz[a], nz[b]
                out = axpy(ctx, ctx.mul(c, d), g.bracket_basis(i, j), out)
        return out

    def __call__(self, x: Sequence[int]) -> list[int]:
        g = self.g
        e, f = g.split_parity(x)
        out = self.even_part(e)
        if any(f):
            out = axpy(g.ctx, 1, g.square(f), out)
            out = axpy(g.ctx, 1, g.bracket(e, f), out)
        return out


def derive_22_structure(g: SuperAlgebra, witness: StructureWitness | None = None,
                        samples: int = 24, seed: int = 0) -> TwoTwoMap:
    """2|2-structure from a 2|4-structure; sample-checks the defining identity."""
    if g.p != 2:
        raise WrongCharacteristic("2|2-structures live in characteristic 2")
    if witness is None:
        witness = find_p2p_structure(g)
    if witness is None:
        raise MissingWitness("no 2|4-structure to build on")
    m = TwoTwoMap(g, witness)
    rng = random.Random(seed)
    q = g.ctx.order
    for _ in range(samples):
        x = [rng.randrange(q) for _ in range(g.n)]
        adsq = g.ad(m(x))
        adx = g.ad(x)
        twice = mat_mul(g.ctx, adx, adx, g.n)
        if adsq != twice:
            raise InvalidWitness(f"[x^[2], y] != [x, [x, y]] for x = {g.format(x)}")
    return m


# -- (2,4)-structures ----------------------------------------------------------------

def _validate_split(g: SuperAlgebra, split: Sequence[int]) -> tuple[int, ...]:
    split = tuple(int(s) for s in split)
    if len(split) != g.n or any(s not in (0, 1) for s in split):
        raise BadSplit("split must tag every basis vector with 0 or 1")
    bad = check_split(g, split)
    if bad:
        raise BadSplit(f"split is not a Z/2-grading: {bad[0]}")
    return split


def find_24_structure(g: SuperAlgebra, split: Sequence[int]) -> StructureWitness | None:
    """[2] on the 0-tagged part, [4] on the 1-tagged part of a Lie algebra.

    ``outcome`` is "full-2" when a global 2-structure exists, "(2,4)" when
    only the split structure exists, "(2,-)" when the [4]-part is missing;
    None is returned when even the [2]-part fails.
    """
    if g.p != 2:
        raise WrongCharacteristic("(2,4)-structures live in characteristic 2")
    if g.dim_odd:
        raise ParityViolation("(2,4)-structures are for Lie algebras; use find_244_structure")
    split = _validate_split(g, split)
    plus = [i for i in range(g.n) if split[i] == 0]
    minus = [i for i in range(g.n) if split[i] == 1]
    sols2, kdim = _solve_ad(g, [ad_power(g, i, 2) for i in plus], plus)
    if any(s is None for s in sols2):
        return None
    full = find_p_structure(g) is not None
    sols4, _ = _solve_ad(g, [ad_power(g, i, 4) for i in minus], plus)
    low = dict(zip(plus, sols2))
    if any(s is None for s in sols4):
        return StructureWitness("(2,-)", low, {}, split, kdim, "(2,-)", full)
    high = dict(zip(minus, sols4))
    return StructureWitness("(2,4)", low, high, split, kdim, "full-2" if full else "(2,4)", full)


def find_244_structure(g: SuperAlgebra, split: Sequence[int]) -> StructureWitness | None:
    """(2,4)|4-structure on a superalgebra.

    [2] on the even vectors of the 0-tagged part, [4] on the 1-tagged part
    and on the odd vectors of the 0-tagged part; images are sought in the
    even 0-tagged part.
    """
    if g.p != 2:
        raise WrongCharacteristic("(2,4)|4-structures live in characteristic 2")
    split = _validate_split(g, split)
    plus_ev = [i for i in range(g.n) if split[i] == 0 and g.parity[i] == 0]
    four = [i for i in range(g.n) if split[i] == 1 or g.parity[i] == 1]
    targets = [ad_power(g, i, 2) for i in plus_ev] + [ad_power(g, i, 4) for i in four]
    sols, kdim = _solve_ad(g, targets, plus_ev)
    if any(s is None for s in sols):
        return None
    low = dict(zip(plus_ev, sols[:len(plus_ev)]))
    high = dict(zip(four, sols[len(plus_ev):]))
    return StructureWitness("(2,4)|4", low, high, split, kdim, "(2,4)|4")


# -- modules -------------------------------------------------------------------------

@dataclass
class ModuleAction:
    """Representation rho: basis index -> matrix (rows) of a module."""

    algebra: SuperAlgebra
    dim: int
    rho: list[list[list[int]]]

    def of(self, x: Sequence[int]) -> list[list[int]]:
        ctx = self.algebra.ctx
        out = [[0] * self.dim for _ in range(self.dim)]
        for i, c in enumerate(x):
            if c:
                out = [axpy(ctx, c, r, o) for r, o in zip(self.rho[i], out)]
        return out

    def power(self, x: Sequence[int], e: int) -> list[list[int]]:
        return mat_pow_rows(self.algebra.ctx, self.of(x), e)

    def violations(self) -> list[str]:
        """Representation axioms on basis pairs (and odd squares for p=2)."""
        g, ctx = self.algebra, self.algebra.ctx
        out = []
        for i in range(g.n):
            for j in range(i, g.n):
                lhs = self.of(g.bracket_basis(i, j))
                a, b = self.rho[i], self.rho[j]
                ab = mat_mul(ctx, a, b, self.dim)
                ba = mat_mul(ctx, b, a, self.dim)
                both_odd = g.parity[i] and g.parity[j]
                s = 1 if both_odd else ctx.neg(1)
                rhs = [axpy(ctx, s, r2, r1) for r1, r2 in zip(ab, ba)]
                if i == j and g.p == 2:
                    continue
                if lhs != rhs:
                    out.append(f"rho([{g.names[i]}, {g.names[j]}])")
        if g.p == 2:
            for i in g.odd:
                if self.of(g.square_basis(i)) != mat_mul(ctx, self.rho[i], self.rho[i], self.dim):
                    out.append(f"rho({g.names[i]}^2)")
        return out


def adjoint_module(g: SuperAlgebra) -> ModuleAction:
    return ModuleAction(g, g.n, [g.ad_basis(i) for i in range(g.n)])


@dataclass
class ModuleVerdict:
    ok: bool
    failures: list[str]

    def __bool__(self) -> bool:
        return self.ok


def check_restricted_module(g: SuperAlgebra, witness: StructureWitness, act: ModuleAction) -> ModuleVerdict:
    """Check rho(x^[e]) = rho(x)^e on the basis for the witness variant."""
    if witness.variant == "p" and g.dim_odd:
        raise VariantMismatch("variant p needs a Lie algebra")
    if witness.variant in ("(2,4)", "(2,-)", "(2,4)|4") and witness.split is None:
        raise VariantMismatch("split variants need a split")
    if witness.variant == "2|2" and g.p != 2:
        raise VariantMismatch("2|2 needs characteristic 2")
    failures = []
    for i, img in sorted(witness.low.items()):
        if act.of(img) != act.power(g.basis(i), witness.exponent_low):
            failures.append(g.names[i])
    for i, img in sorted(witness.high.items()):
        if act.of(img) != act.power(g.basis(i), witness.exponent_high):
            failures.append(g.names[i])
    if witness.variant in ("p|2p", "2|2") and g.p == 2:
        for i in g.odd:
            if act.of(g.square_basis(i)) != act.power(g.basis(i), 2):
                failures.append(f"{g.names[i]}^2")
    return ModuleVerdict(not failures, failures)


# -- closures inside gl(g) -------------------------------------------------------------

@dataclass
class Closure:
    """Subalgebra of gl(g) spanned by ``matrices``; the first g.n are ad(b_i).

    ``power_images`` maps basis index to coordinates of its p-th matrix power
    when that power lies inside the closure.  ``tags`` are Z/2 tags (from a
    split) and ``degrees`` Z-degrees (from a grading) of the basis, if known.
    """

    base: SuperAlgebra
    matrices: list[list[list[int]]]
    algebra: SuperAlgebra
    model: MatrixAlgebra
    power_images: dict[int, list[int]]
    tags: list[int] | None = None
    degrees: list[int] | None = None

    @property
    def dim(self) -> int:
        return len(self.matrices)

    def embedding(self) -> list[int]:
        return list(range(self.base.n))


def _require_centerless(g: SuperAlgebra) -> None:
    if center(g).dim:
        raise HasCenter("the algebra has a center, so ad is not injective (quotient first)")


def _homogeneous_parts(m: list[list[int]], key) -> dict:
    """Split a matrix in gl(g) by the weight key(r, c) of its entries."""
    parts: dict = {}
    n = len(m)
    for r in range(n):
        for c in range(n):
            if m[r][c]:
                parts.setdefault(key(r, c), [[0] * n for _ in range(n)])[r][c] = m[r][c]
    return parts


def _close(g: SuperAlgebra, extra: list[list[list[int]]], close_powers: bool) -> list[list[list[int]]]:
    """Lie closure in gl(g) of ad(g) and ``extra`` (and p-th powers if asked)."""
    ctx = g.ctx
    n = g.n
    nn = n * n
    ech = Echelon(ctx, nn)
    basis: list[list[list[int]]] = []
    queue: list[list[list[int]]] = []

    def push(m):
        if ech.add(flat(m)) is not None:
            basis.append(m)
            queue.append(m)

    for i in range(n):
        push(g.ad_basis(i))
    for m in extra:
        push(m)
    neg1 = ctx.neg(1)
    steps = 0
    cap = max(ROUND_CAP, 4) * max(nn, 1)
    while queue:
        steps += 1
        if steps > cap:
            raise IterationCapExceeded("closure did not stabilize")
        a = queue.pop(0)
        for b in list(basis):
            ab = mat_mul(ctx, a, b, n)
            ba = mat_mul(ctx, b, a, n)
            push([axpy(ctx, neg1, r2, r1) for r1, r2 in zip(ab, ba)])
        if close_powers:
            push(mat_pow_rows(ctx, a, g.p))
    return basis


def _finish(g: SuperAlgebra, mats, split=None, names_extra="c") -> Closure:
    """Rebase extra matrices into homogeneous pieces and build the algebra."""
    ctx = g.ctx
    n = g.n
    deg = g.grading

    def key(r, c):
        return (deg[r] - deg[c] if deg is not None else 0,
                (split[r] - split[c]) % 2 if split is not None else 0)

    final = [g.ad_basis(i) for i in range(n)]
    keys = [(deg[i] if deg is not None else 0, split[i] if split is not None else 0) for i in range(n)]
    ech = Echelon(ctx, n * n, [flat(m) for m in final])
    for m in mats[n:]:
        for k, piece in sorted(_homogeneous_parts(m, key).items()):
            if ech.add(flat(piece)) is not None:
                final.append(piece)
                keys.append(k)
    names = list(g.names) + [f"{names_extra}{t}" for t in range(len(final) - n)]
    z_grading = [k[0] for k in keys] if deg is not None else None
    model = MatrixAlgebra(ctx, final, names, grading=z_grading, meta=dict(g.meta))
    powers = {}
    for i, m in enumerate(final):
        c = model.coords_system.coords(flat(mat_pow_rows(ctx, m, g.p)))
        if c is not None:
            powers[i] = c
    tags = [k[1] for k in keys] if split is not None else None
    return Closure(g, final, model.algebra, model, powers, tags, z_grading)


def restricted_closure(g: SuperAlgebra) -> Closure:
    """Smallest subalgebra of gl(g) containing ad(g), closed under bracket and p-th powers."""
    if g.dim_odd:
        raise ParityViolation("restricted closure is defined for Lie algebras")
    _require_centerless(g)
    return _finish(g, _close(g, [], True))


def one_step_closure(g: SuperAlgebra) -> Closure:
    """Lie span in gl(g) of ad(g) and the squares (ad x)^2 for x in g."""
    if g.p != 2:
        raise WrongCharacteristic("the 1-step closure is used in characteristic 2")
    if g.dim_odd:
        raise ParityViolation("1-step closure is defined for Lie algebras")
    _require_centerless(g)
    squares = [mat_mul(g.ctx, g.ad_basis(i), g.ad_basis(i), g.n) for i in range(g.n)]
    return _finish(g, _close(g, squares, False))


def minimal_graded_closure(g: SuperAlgebra, split: Sequence[int]) -> Closure:
    """Lie span in gl(g) of ad(g) and (ad x)^2 for x in the 1-tagged part.

    The split (and the Z-grading, if any) extends to the closure with
    squares landing in even degree.
    """
    if g.p != 2:
        raise WrongCharacteristic("method-2 closures are used in characteristic 2")
    if g.dim_odd:
        raise ParityViolation("graded closure is defined for Lie algebras")
    split = _validate_split(g, split)
    _require_centerless(g)
    minus = [i for i in range(g.n) if split[i] == 1]
    squares = [mat_mul(g.ctx, g.ad_basis(i), g.ad_basis(i), g.n) for i in minus]
    cl = _finish(g, _close(g, squares, False), split=split, names_extra="s")
    return cl


def squares_in_closure(cl: Closure, indices: Sequence[int]) -> dict[int, list[int]]:
    """Coordinates of (ad b_i)^2 inside the closure for the given base indices."""
    g = cl.base
    out = {}
    for i in indices:
        sq = mat_mul(g.ctx, g.ad_basis(i), g.ad_basis(i), g.n)
        c = cl.model.coords_system.coords(flat(sq))
        if c is None:
            raise InvalidWitness(f"(ad {g.names[i]})^2 is outside the closure")
        out[i] = c
    return out
