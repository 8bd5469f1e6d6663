import random

import pytest
from hypothesis import given, settings, strategies as st

from lieforge import catalog
from lieforge.errors import NotAnIdeal, NotOdd, ParityViolation, WrongCharacteristic
from lieforge.linalg import Subspace
from lieforge.superalg import (
    Element,
    algebra_from_constants,
    center,
    check_axioms,
    derived,
    derived_series,
    grade_mod2,
    is_ideal,
    is_simple,
    quotient,
    spin_ideal,
    subalgebra,
)


@pytest.fixture(scope="module")
def oo12():
    return catalog.oo1_IPi_1_2()


def brute_center(g):
    """Every vector of g over GF(2) checked against every basis vector."""
    out = []
    for bits in range(1 << g.n):
        v = [(bits >> i) & 1 for i in range(g.n)]
        if all(not any(g.bracket(v, g.basis(j))) for j in range(g.n)):
            out.append(v)
    return out


def test_abelian_algebra_is_valid(gf3):
    g = algebra_from_constants(gf3, ["a", "b", "c"], [0, 0, 0], [])
    assert check_axioms(g).ok
    assert derived(g, 1).dim == 0
    assert not is_simple(g).simple


def test_parity_violation_rejected(gf2):
    with pytest.raises(ParityViolation):
        algebra_from_constants(gf2, ["a", "b", "x"], [0, 0, 1], [(0, 1, {2: 1})])


def test_sl2_gf3_passes_axioms(gf3):
    assert check_axioms(catalog.sl(2, gf3)).ok


def test_oo12_relations_and_axioms(oo12):
    g = oo12
    assert g.sdim == (3, 2)
    e = lambda nm: g.vec(nm)  # noqa: E731
    assert g.bracket(e("H"), e("Xp")) == e("Xp")
    assert g.bracket(e("H"), e("Xm")) == e("Xm")
    assert g.bracket(e("Xp"), e("Xm")) == e("H")
    assert g.bracket(e("Xp^2"), e("Xm^2")) == e("H")
    assert g.square(e("Xp")) == e("Xp^2")
    assert g.square(e("Xm")) == e("Xm^2")
    assert check_axioms(g).ok


def test_corrupted_square_fails(oo12):
    g = oo12
    squares = {i: g.square_basis(i) for i in g.odd}
    squares[g.index("Xm")] = g.vec("H")
    entries = [(i, j, g.bracket_basis(i, j)) for i in range(g.n) for j in range(i + 1, g.n) if any(g.bracket_basis(i, j))]
    bad = algebra_from_constants(g.ctx, g.names, g.parity, entries, squares)
    report = check_axioms(bad)
    assert not report.ok
    assert any("Xm" in str(v) for v in report.violations)


def test_square_by_polarization(oo12):
    g = oo12
    x = Element(g, g.vec({"Xp": 1, "Xm": 1}))
    assert x.square().coeffs == g.vec({"Xp^2": 1, "Xm^2": 1, "H": 1})


def test_square_preconditions(oo12, gf3):
    with pytest.raises(NotOdd):
        oo12.square(oo12.vec("H"))
    sl2 = catalog.sl(2, gf3)
    with pytest.raises((WrongCharacteristic, NotOdd)):
        sl2.square(sl2.vec("E12"))


def test_even_self_bracket_vanishes(gf3):
    g = catalog.gl(2, gf3)
    rng = random.Random(1)
    for _ in range(10):
        v = [rng.randrange(3) for _ in range(g.n)]
        assert not any(g.bracket(v, v))


def test_spin_ideal_basics(gf2):
    g = catalog.psl(3, gf2)
    assert spin_ideal(g, []).dim == 0
    for i in range(g.n):
        assert spin_ideal(g, [g.basis(i)]).dim == g.n


def test_spin_recovers_scalar_ideal_in_q_oI4(gf2):
    from lieforge.superize import queerify_restricted

    qg = queerify_restricted(catalog.o_I(4, gf2))
    stable = derived(qg, None)
    top = subalgebra(qg, stable)
    assert top.sdim == (9, 6)
    ident = qg.vec({"S11": 1, "S22": 1, "S33": 1, "S44": 1})
    assert derived(qg, None).contains(ident)
    # spinning 1_4 inside q(o_I(4)) gives back the line K 1_4
    ideal = spin_ideal(qg, [ident])
    assert ideal.dim == 1 and ideal.contains(ident)
    z = center(top)
    assert z.dim == 1
    assert z.contains(stable.coordinates(ident))
    assert not is_simple(top).simple


def test_derived_o_I3_is_ZD3(gf2):
    g = catalog.o_I(3, gf2)
    assert g.n == 6
    d1 = derived(g, 1)
    assert d1.dim == 3
    zd = subalgebra(g, d1)
    # every derived element has zero diagonal
    model = g.model
    for v in d1.basis:
        m = model.matrix(v)
        assert all(m[i][i] == 0 for i in range(3))
        assert all(m[i][j] == m[j][i] for i in range(3) for j in range(3))
    assert derived(g, None) == d1
    assert zd.n == 3


def test_derived_series_decreasing(gf2):
    g = catalog.o_Pi(6, gf2)
    series = derived_series(g)
    for a, b in zip(series, series[1:]):
        assert a.contains_space(b)
    assert len(series) <= g.n + 1


def test_center_sl2_gf2_brute_force(gf2):
    g = catalog.sl(2, gf2)
    z = center(g)
    assert z == Subspace(gf2, 3, [g.vec("H1")])
    assert Subspace(gf2, 3, brute_center(g)) == z


def test_center_of_simple_is_zero(gf2):
    assert center(catalog.psl(3, gf2)).dim == 0


def test_center_wk3(data_dir):
    g = catalog.load_algebra_file(data_dir / "wk3_a.alg")
    F = g.ctx
    a = F.generator()
    expected = g.zero()
    expected[g.index("h1")] = a
    expected[g.index("h3")] = 1
    assert center(g) == Subspace(F, g.n, [expected])


def test_quotient_by_zero_and_non_ideal(gf2):
    g = catalog.sl(3, gf2)
    q, project = quotient(g, Subspace.zero(gf2, g.n))
    assert q.n == g.n and check_axioms(q).ok
    with pytest.raises(NotAnIdeal):
        quotient(g, Subspace(gf2, g.n, [g.basis(0)]))


def test_s_e_sq4_modulo_ii_is_ps_e_psq4(gf2):
    g = catalog.s_e_sq(4, gf2)
    ii = catalog.ii_ideal(g)
    assert is_ideal(g, ii)
    q, _ = quotient(g, ii)
    assert (g.dim_even - q.dim_even, g.dim_odd - q.dim_odd) == (1, 1)
    assert q.sdim == catalog.ps_e_psq(4, gf2).sdim


def test_wk3_modulo_center_is_centerless(data_dir):
    g = catalog.load_algebra_file(data_dir / "wk3_a.alg")
    q, _ = quotient(g, center(g))
    assert center(q).dim == 0


def test_psl3_simple_exhaustive(gf2):
    g = catalog.psl(3, gf2)
    verdict = is_simple(g, exhaustive=True)
    assert verdict.simple and verdict.exhaustive
    # cross-check: spin every nonzero vector of GF(2)^8
    for bits in range(1, 1 << g.n):
        v = [(bits >> i) & 1 for i in range(g.n)]
        assert spin_ideal(g, [v]).dim == g.n


def test_simple_implies_every_basis_seed_spins_to_everything(gf2):
    g = catalog.psq(3, gf2)
    assert is_simple(g).simple
    for i in range(g.n):
        assert spin_ideal(g, [g.basis(i)]).dim == g.n
    rng = random.Random(7)
    for _ in range(100):
        v = [rng.randrange(2) for _ in range(g.n)]
        if any(v):
            even, odd = g.split_parity(v)
            seeds = [w for w in (even, odd) if any(w)]
            assert spin_ideal(g, seeds).dim == g.n


def test_grade_mod2_examples(gf2):
    g = catalog.vect(1, [3], 0, gf2)
    assert sorted(set(g.grading)) == list(range(-1, 7))
    assert grade_mod2(g) == [d % 2 for d in g.grading]
    o = catalog.o1_odd_model(2, gf2)
    tags = dict(zip(o.names, grade_mod2(o)))
    assert all(tags[nm] == 1 for nm in o.names if nm[0] in "XY")
    assert all(tags[nm] == 0 for nm in o.names if nm[0] in "ABC")


def test_contact_grading_time_even(gf2):
    g = catalog.k_contact(1, [1, 1, 1], 0, gf2)
    tags = grade_mod2(g)
    assert set(tags) <= {0, 1}
    # the generator of degree -2 is K_1 = d_t, even
    (i,) = [i for i, d in enumerate(g.grading) if d == -2]
    assert tags[i] == 0


def test_perfect_mod_center_centerless(gf2):
    g = catalog.sl(4, gf2)
    assert derived(g, 1).dim == g.n
    q, _ = quotient(g, center(g))
    assert center(q).dim == 0


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 31), st.integers(0, 31))
def test_polarization_identity(bits_x, bits_y):
    g = catalog.oo1_IPi_1_2()
    odd = g.odd
    x = g.zero()
    y = g.zero()
    for t, i in enumerate(odd):
        x[i] = (bits_x >> t) & 1
        y[i] = (bits_y >> t) & 1
    s = [a ^ b for a, b in zip(x, y)]
    lhs = g.square(s)
    rhs = [a ^ b ^ c for a, b, c in zip(g.square(x), g.square(y), g.bracket(x, y))]
    assert lhs == rhs
