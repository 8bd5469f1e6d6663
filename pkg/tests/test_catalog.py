import itertools
import json
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from lieforge import catalog
from lieforge.errors import AxiomFailure, BadParams, BadShearing, ParseError
from lieforge.ffield import ff_make
from lieforge.linalg import Subspace, rref_rows
from lieforge.restrict import find_p_structure
from lieforge.superalg import check_axioms, derived, derived_series, quotient
from lieforge.superize import queerify_restricted
from lieforge.vectorial import DividedPowerCtx, VectorFields, build_divided_powers, lucas_binomial


@pytest.fixture(scope="module")
def F2():
    return ff_make(2)


def mono(dp, a, b=0):
    return dp.index[(tuple(a), b)]


# -- matrix families ----------------------------------------------------------------

def test_o_I3_dimension(F2):
    assert catalog.o_I(3, F2).n == 6


@pytest.mark.parametrize("n", [3, 4, 5])
def test_o_I_derived_is_ZD(F2, n):
    g = catalog.o_I(n, F2)
    d1 = derived(g, 1)
    assert d1.dim == n * (n - 1) // 2
    for v in d1.basis:
        m = g.model.matrix(v)
        assert all(m[i][i] == 0 for i in range(n))
    assert derived(g, None) == d1


def test_o_B_closed_under_squaring(F2):
    rng = random.Random(3)
    for g in (catalog.o_I(4, F2), catalog.o_Pi(6, F2)):
        model = g.model
        samples = [g.basis(i) for i in range(g.n)]
        samples += [[rng.randrange(2) for _ in range(g.n)] for _ in range(50)]
        for v in samples:
            m = model.matrix(v)
            sq = [[sum(m[i][k] * m[k][j] for k in range(len(m))) % 2 for j in range(len(m))] for i in range(len(m))]
            model.coords(sq)  # raises if X^2 left the algebra


def queer_derived_conditions(g, base, v, k):
    """(A in sl, A' in sl, C, D, C', D' in ZD) flags of an element of q(o_Pi(2k))."""
    n = base.n
    even = base.model.matrix(v[:n])
    odd = base.model.matrix(v[n:])
    flags = []
    for m in (even, odd):
        A = [row[:k] for row in m[:k]]
        C = [row[k:] for row in m[:k]]
        D = [row[:k] for row in m[k:]]
        flags.append(sum(A[i][i] for i in range(k)) % 2 == 0)
        flags.append(all(C[i][i] == 0 and D[i][i] == 0 for i in range(k)))
    return flags


def test_q_o_Pi6_derived_table(F2):
    k = 3
    base = catalog.o_Pi(2 * k, F2)
    qg = queerify_restricted(base)
    series = derived_series(qg)
    # dims from the table: i=1 gl|gl, i=2 gl|sl, i>=3 sl|sl, always with ZD blocks
    gl, sl, zd = k * k, k * k - 1, k * (k - 1) // 2
    expected = {1: (gl + 2 * zd, gl + 2 * zd), 2: (gl + 2 * zd, sl + 2 * zd), 3: (sl + 2 * zd, sl + 2 * zd)}
    for i, (de, do) in expected.items():
        space = series[i]
        evens = sum(1 for v in space.basis if qg.parity_of(v) == 0)
        assert (evens, space.dim - evens) == (de, do), i
        for v in space.basis:
            even_sl, even_zd, odd_sl, odd_zd = queer_derived_conditions(qg, base, v, k)
            assert even_zd and odd_zd
            if i >= 2 and qg.parity_of(v) == 1:
                assert odd_sl
            if i >= 3 and qg.parity_of(v) == 0:
                assert even_sl
    assert series[3] == series[4]


@pytest.mark.parametrize("n", [3, 4])
def test_q_n_is_q_of_gl(F2, n):
    a, b = catalog.q(n, F2), queerify_restricted(catalog.gl(n, F2))
    assert (a.names, a.table, a.squares) == (b.names, b.table, b.squares)


@pytest.mark.parametrize("n", [3, 4])
def test_s_e_sq_is_q_of_sl(F2, n):
    a, b = catalog.s_e_sq(n, F2), queerify_restricted(catalog.sl(n, F2))
    assert (a.names, a.table, a.squares) == (b.names, b.table, b.squares)


def test_ps_e_psq4_is_q_of_psl4(F2):
    a, b = catalog.ps_e_psq(4, F2), queerify_restricted(catalog.psl(4, F2))
    assert (a.names, a.table, a.squares) == (b.names, b.table, b.squares)


def test_s_e_sq3_maps_isomorphically_onto_psq3(F2):
    sq, se, ps = catalog.sq(3, F2), catalog.s_e_sq(3, F2), catalog.psq(3, F2)
    one = sq.model.coords([[int(i == j) for j in range(6)] for i in range(6)])
    q, project = quotient(sq, Subspace(F2, sq.n, [one]))
    assert (q.names, q.table, q.squares) == (ps.names, ps.table, ps.squares)

    def phi(v):
        return project(sq.model.coords(se.model.matrix(v)))

    images = [phi(se.basis(i)) for i in range(se.n)]
    assert len(rref_rows(F2, images, ps.n)[1]) == ps.n
    for i, j in itertools.combinations_with_replacement(range(se.n), 2):
        assert phi(se.bracket_basis(i, j)) == ps.bracket(images[i], images[j])
    for i in se.odd:
        assert phi(se.square_basis(i)) == ps.square(images[i])


def test_q2_block_model(F2):
    g = catalog.q(2, F2)
    A, B = catalog.queer_blocks(g, g.vec({"E12": 1, "Pi(E21)": 1}))
    assert A == [[0, 1], [0, 0]] and B == [[0, 0], [1, 0]]
    m = g.model.matrix(g.vec("Pi(E21)"))
    assert m == [[0, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 0], [1, 0, 0, 0]]


def test_bad_params(F2):
    with pytest.raises(BadParams):
        catalog.o_Pi(5, F2)
    with pytest.raises(ParseError):
        catalog.build("nosuch:n=3")


def test_parse_ref():
    assert catalog.parse_ref("o_I:n=5,p=2") == ("o_I", {"n": "5", "p": "2"})
    assert catalog.parse_ref("psl3") == ("psl", {"n": "3"})
    assert catalog.parse_ref("q:psl3") == ("q", {"of": "psl3"})
    assert catalog.parse_ref("vect:m=2,N=(2,2)") == ("vect", {"m": "2", "N": "(2,2)"})


# -- divided powers -----------------------------------------------------------------

def test_divided_powers_truncation(F2):
    dp = build_divided_powers(1, [1], 0, F2)
    assert dp.dim == 2
    x = {mono(dp, [1]): 1}
    assert dp.mul(x, x) == {}


def test_divided_powers_lucas(F2):
    dp = build_divided_powers(1, [2], 0, F2)
    x1, x2, x3 = ({mono(dp, [k]): 1} for k in (1, 2, 3))
    assert dp.mul(x1, x1) == {}
    assert dp.mul(x1, x2) == x3


def test_grassmann(F2):
    dp = build_divided_powers(0, [], 2, F2)
    assert dp.dim == 4
    xi1, xi2 = {mono(dp, [], 1): 1}, {mono(dp, [], 2): 1}
    assert dp.mul(xi1, xi1) == {}
    assert dp.mul(xi1, xi2) == dp.mul(xi2, xi1) == {mono(dp, [], 3): 1}


def test_grassmann_sign_char3():
    F = ff_make(3)
    dp = build_divided_powers(0, [], 2, F)
    xi1, xi2 = {mono(dp, [], 1): 1}, {mono(dp, [], 2): 1}
    a, b = dp.mul(xi1, xi2), dp.mul(xi2, xi1)
    (k,) = a
    assert b == {k: F.neg(a[k])}


def test_bad_shearing(F2):
    with pytest.raises(BadShearing):
        DividedPowerCtx(F2, 2, [1, 0])


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 400), st.integers(0, 400), st.sampled_from([2, 3, 5, 7]))
def test_lucas_matches_math_comb(n, k, p):
    assert lucas_binomial(n, k, p) == math.comb(n, k) % p


@pytest.mark.parametrize("p,N", [(2, [3]), (3, [2]), (2, [1, 2])])
def test_divided_power_dimension_and_associativity(p, N):
    F = ff_make(p)
    dp = build_divided_powers(len(N), N, 1, F)
    assert dp.dim == p ** sum(N) * 2
    units = [{i: 1} for i in range(dp.dim)]
    for a, b, c in itertools.product(units[:8], repeat=3):
        assert dp.mul(dp.mul(a, b), c) == dp.mul(a, dp.mul(b, c))


# -- vectorial ------------------------------------------------------------------------

def test_vect_1_1(F2):
    g = catalog.vect(1, [1], 0, F2)
    assert g.names == ("d_x1", "x1*d_x1")


@pytest.mark.parametrize("n", [1, 2, 3])
def test_vect_Ns_dimension(F2, n):
    assert catalog.vect(n, [1] * n, 0, F2).n == n * 2 ** n


def test_vect2_graded_dims(F2):
    g = catalog.vect(2, [1, 1], 0, F2)
    dims = {d: g.grading.count(d) for d in set(g.grading)}
    assert dims == {-1: 2, 0: 4, 1: 2}


def test_deform_vect_1_1(F2):
    g = catalog.vect(1, [1], 0, F2)
    d = catalog.deform_onebarx(g)
    vf = d.vector_fields
    dp = vf.dp
    one, x = mono(dp, [0]), mono(dp, [1])
    expected = [{vf.basis_index(one, 0): 1, vf.basis_index(x, 0): 1}, {vf.basis_index(x, 0): 1}]
    got = Subspace(F2, vf.dim, [vf.dense(X) for X in d.fields])
    assert got == Subspace(F2, vf.dim, [vf.dense(X) for X in expected])
    assert catalog.deform_onebarx(d).n == d.n == g.n
    assert check_axioms(d).ok


def test_svect_divergence_free(F2):
    g = catalog.svect(2, [1, 1], 0, F2)
    vf = g.vector_fields
    assert all(not vf.divergence(X) for X in g.fields)


def test_hamiltonian_and_contact_axioms(F2):
    for g in (catalog.h_B(2, [1, 1], F2, "Pi"), catalog.h_B(3, [1] * 3, F2, "I"),
              catalog.k_contact(1, [1, 1, 1], 0, F2), catalog.k_contact(0, [1], 1, F2)):
        assert check_axioms(g).ok, g.meta


def test_variable_split_homogeneous(F2):
    g = catalog.h_B(3, [1] * 3, F2, "I_pqx")
    tags = catalog.variable_split(g, [0, 0, 1])
    from lieforge.superalg import check_split

    assert not check_split(g, tags)
    assert tags[g.names.index("d_x")] == 1


# -- data files ---------------------------------------------------------------------

def test_wk4_loads_with_expected_block(data_dir):
    g = catalog.load_algebra_file(data_dir / "wk4_a.alg")
    assert g.n == 34 and catalog.expected_witness(g) is not None


def test_br2_eps_H2_cube(data_dir):
    g = catalog.load_algebra_file(data_dir / "br2_eps.alg")
    F = g.ctx
    eps = F.parse(g.meta["eps"])
    assert eps == F.primitive()
    w = find_p_structure(g)
    e2 = F.mul(eps, eps)
    expected = g.zero()
    expected[g.index("H1")] = F.add(2, e2)
    expected[g.index("H2")] = e2
    assert w.low[g.index("H2")] == expected
    assert w.low[g.index("H1")] == g.vec("H1")


def _cartan_cube_map_invariants(g):
    """Fixed, kernel and image dimensions of h -> h^[3] on span{H1, H2} over GF(3)."""
    F = g.ctx
    w = find_p_structure(g)
    hs = [g.index("H1"), g.index("H2")]
    vectors = []
    for c1 in range(F.order):
        for c2 in range(F.order):
            img = g.zero()
            for c, i in ((c1, hs[0]), (c2, hs[1])):
                fc = F.pow(c, 3)
                img = [F.add(a, F.mul(fc, b)) for a, b in zip(img, w.low[i])]
            src = g.zero()
            src[hs[0]], src[hs[1]] = c1, c2
            vectors.append((src, img))
    fixed = sum(1 for s, t in vectors if s == t)
    kernel = sum(1 for _, t in vectors if not any(t))
    image = len({tuple(t) for _, t in vectors})
    return fixed, kernel, image


def test_br_isomorphism_necessary_conditions(data_dir):
    a = catalog.load_algebra_file(data_dir / "br2_eps.alg")
    b = catalog.load_algebra_file(data_dir / "br2_eps_inv.alg")
    Fa = a.ctx
    assert Fa.mul(Fa.parse(a.meta["eps"]), Fa.parse(b.meta["eps"])) == 1
    dims = lambda g: sorted((d, g.grading.count(d)) for d in set(g.grading))  # noqa: E731
    assert dims(a) == dims(b)
    assert _cartan_cube_map_invariants(a) == _cartan_cube_map_invariants(b)


def test_bad_jacobi_rejected(data_dir):
    with pytest.raises(AxiomFailure) as err:
        catalog.load_algebra_file(data_dir / "bad_jacobi.alg")
    assert err.value.violations
    g = catalog.load_algebra_file(data_dir / "bad_jacobi.alg", check=False)
    assert not check_axioms(g).ok


@pytest.mark.parametrize("name", ["wk3_a.alg", "wk4_a.alg", "br2_eps.alg", "L_eps_0_0.alg", "vect2_22_w13.alg"])
def test_file_round_trip_byte_stable(data_dir, name, tmp_path):
    path = data_dir / name
    g = catalog.load_algebra_file(path)
    text = path.read_text(encoding="utf-8")
    again = catalog.dumps_algebra(g, g.meta.get("expected_witness"))
    reloaded = catalog.algebra_from_json(json.loads(again))
    assert catalog.dumps_algebra(reloaded, reloaded.meta.get("expected_witness")) == again
    assert again == text


def test_catalog_round_trip(F2, tmp_path):
    g = catalog.oo1_IPi_1_2(F2)
    path = tmp_path / "oo.alg"
    catalog.save_algebra_file(g, path)
    back = catalog.load_algebra_file(path)
    assert (back.names, back.parity, back.table, back.squares) == (g.names, g.parity, g.table, g.squares)
    assert catalog.dumps_algebra(back) == path.read_text(encoding="utf-8")


def test_parse_errors(tmp_path):
    bad = tmp_path / "bad.alg"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(ParseError):
        catalog.load_algebra_file(bad)
    bad.write_text(json.dumps({"format": "lieforge-algebra"}), encoding="utf-8")
    with pytest.raises(ParseError):
        catalog.load_algebra_file(bad)


def test_witness_block_validation(data_dir):
    g = catalog.load_algebra_file(data_dir / "br2_eps.alg")
    with pytest.raises(ParseError):
        catalog.witness_from_json(g, {"low": {"nope": {}}})
    with pytest.raises(ParseError):
        catalog.witness_from_json(g, {"low": {"H1": [1, 0]}})


def test_vector_fields_bracket_is_commutator(F2):
    dp = build_divided_powers(2, [1, 1], 0, F2)
    vf = VectorFields(dp)
    rng = random.Random(0)
    for _ in range(20):
        X = {i: 1 for i in range(vf.dim) if rng.random() < 0.3}
        Y = {i: 1 for i in range(vf.dim) if rng.random() < 0.3}
        B = vf.bracket(X, Y)
        for m in range(dp.dim):
            f = {m: 1}
            lhs = vf.apply(B, f)
            rhs = {}
            for k, c in list(vf.apply(X, vf.apply(Y, f)).items()) + list(vf.apply(Y, vf.apply(X, f)).items()):
                rhs[k] = (rhs.get(k, 0) + c) % 2
            assert lhs == {k: c for k, c in rhs.items() if c}
