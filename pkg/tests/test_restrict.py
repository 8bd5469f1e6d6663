import pytest

from lieforge import catalog
from lieforge.errors import BadSplit, HasCenter, MissingWitness
from lieforge.linalg import Subspace, mat_mul, mat_pow_rows
from lieforge.matrices import flat
from lieforge.restrict import (
    ModuleAction,
    StructureWitness,
    adjoint_module,
    check_candidate,
    check_restricted_module,
    derive_22_structure,
    find_24_structure,
    find_244_structure,
    find_p2p_structure,
    find_p_structure,
    minimal_graded_closure,
    one_step_closure,
    restricted_closure,
    verify_witness,
)
from lieforge.superalg import algebra_from_constants, check_split, derived, grade_mod2, is_ideal, subalgebra
from lieforge.superize import queerify_restricted


def vect1_derived(ctx):
    g = catalog.vect(1, [2], 0, ctx)
    return subalgebra(g, derived(g, 1))


def same_ad(g, u, v):
    return g.ad(u) == g.ad(v)


def test_wk4_witness_matches_expected_block(data_dir):
    g = catalog.load_algebra_file(data_dir / "wk4_a.alg")
    found = find_p_structure(g)
    expected = catalog.expected_witness(g)
    assert found is not None and expected is not None
    assert not verify_witness(g, expected)
    for i in range(g.n):
        assert same_ad(g, found.low[i], expected.low[i]), g.names[i]
    # h1 image spelled out
    F = g.ctx
    a = F.generator()
    h1 = g.zero()
    h1[g.index("h1")] = a
    h1[g.index("h4")] = F.add(1, a)
    assert same_ad(g, found.low[g.index("h1")], h1)
    assert same_ad(g, found.low[g.index("h3")], g.vec("h3"))


def test_wk3_derived_mod_center_has_no_2_structure(data_dir):
    g = catalog.load_algebra_file(data_dir / "wk3_derived_mod_center.alg")
    assert find_p_structure(g) is None


def test_abelian_zero_witness(gf3):
    g = algebra_from_constants(gf3, ["a", "b"], [0, 0], [])
    w = find_p_structure(g)
    assert w is not None and all(not any(v) for v in w.low.values())


def test_oo12_remark_candidate_rejected():
    g = catalog.oo1_IPi_1_2()
    xm2, xm = g.index("Xm^2"), g.index("Xm")
    bad = check_candidate(g, {xm2: g.vec("H")}, 2)
    hits = [b for b in bad if b[1] == "Xm"]
    assert hits
    _, _, lhs, rhs = hits[0]
    assert lhs == g.vec("Xm")  # [H, X_-]
    assert rhs == g.bracket(g.basis(xm2), g.bracket(g.basis(xm2), g.basis(xm)))
    assert not any(rhs)


def test_q_psl3_has_2_4_structure(gf2):
    qg = queerify_restricted(catalog.psl(3, gf2))
    w = find_p2p_structure(qg)
    assert w is not None and not verify_witness(qg, w)


def test_p2p_reduces_to_p_on_lie_algebras(gf2):
    g = catalog.psl(3, gf2)
    a, b = find_p2p_structure(g), find_p_structure(g)
    assert a.variant == "p" and a.low == b.low


def test_22_map_cases():
    g = catalog.oo1_IPi_1_2()
    m = derive_22_structure(g)
    assert m(g.zero()) == g.zero()
    f = g.vec({"Xp": 1, "Xm": 1})
    assert m(f) == g.square(f)
    e = g.vec("H")
    x = [a ^ b for a, b in zip(e, f)]
    expected = [a ^ b ^ c for a, b, c in zip(m.even_part(e), g.square(f), g.bracket(e, f))]
    assert m(x) == expected


def test_22_needs_witness(gf2):
    with pytest.raises(MissingWitness):
        derive_22_structure(vect1_derived(gf2))


def test_o1_odd_has_24_but_no_2_structure(gf2):
    g = catalog.o1_odd_model(2, gf2)
    split = grade_mod2(g)
    w = find_24_structure(g, split)
    assert w is not None
    assert w.outcome == "(2,4)" and w.has_full_two is False
    assert find_p_structure(g) is None
    model = g.model
    for i, img in w.low.items():
        assert model.matrix(img) == mat_pow_rows(gf2, model.mats[i], 2)
    for i, img in w.high.items():
        assert model.matrix(img) == mat_pow_rows(gf2, model.mats[i], 4)


def test_h_I5_pqx_has_24_structure(gf2):
    g = catalog.h_B(5, [1] * 5, gf2, "I_pqx")
    split = catalog.variable_split(g, [0, 0, 0, 0, 1])
    w = find_24_structure(g, split)
    assert w is not None and w.outcome == "(2,4)"
    assert not verify_witness(g, w)


def test_trivial_split_recovers_p_structure(gf2):
    g = catalog.psl(3, gf2)
    w = find_24_structure(g, [0] * g.n)
    assert w.outcome == "full-2" and not w.high
    assert w.low == find_p_structure(g).low


def test_244_on_orthosymplectic(gf2):
    g = catalog.oo_JPi_graded(2, 2, gf2)
    w = find_244_structure(g, grade_mod2(g))
    assert w is not None and not verify_witness(g, w)


def test_244_degenerate_split(gf2):
    g = catalog.psl(3, gf2)
    w = find_244_structure(g, [0] * g.n)
    assert not w.high and w.low == find_p_structure(g).low


def test_bad_split_on_q_sl2(gf2):
    qg = queerify_restricted(catalog.sl(2, gf2))
    wrong = [0, 1, 0, 0, 0, 0]
    assert check_split(qg, wrong)
    with pytest.raises(BadSplit):
        find_244_structure(qg, wrong)


def test_adjoint_module_restricted(gf2):
    g = catalog.psl(3, gf2)
    assert check_restricted_module(g, find_p_structure(g), adjoint_module(g)).ok


def test_tautological_o_I3_module(gf2):
    g = catalog.o_I(3, gf2)
    w = catalog.matrix_square_witness(g)
    act = ModuleAction(g, 3, [m for m in g.model.mats])
    assert not act.violations()
    assert check_restricted_module(g, w, act).ok
    i = g.index("S12")
    rho = [[row[:] for row in m] for m in g.model.mats]
    for r in range(3):
        rho[i][r][r] ^= 1
    verdict = check_restricted_module(g, w, ModuleAction(g, 3, rho))
    assert not verdict.ok and "S12" in verdict.failures


def test_closure_of_restricted_is_itself(gf2):
    g = catalog.psl(3, gf2)
    assert restricted_closure(g).dim == g.n
    assert one_step_closure(g).dim == g.n
    assert minimal_graded_closure(g, [0] * g.n).dim == g.n


def test_closure_of_o_I5_sl(gf2):
    g = catalog.o_I_sl(5, gf2)
    assert restricted_closure(g).dim == g.n


def test_vect1_derived_closures(gf2):
    g = vect1_derived(gf2)
    assert find_p_structure(g) is None
    full = restricted_closure(g)
    one = one_step_closure(g)
    assert full.dim > g.n and one.dim > g.n
    # g is an ideal of g^<1>
    emb = Subspace(gf2, one.dim, [one.algebra.basis(i) for i in range(g.n)])
    assert is_ideal(one.algebra, emb, squaring_closed=False)
    # g^<1> sits inside the restricted closure, with equality when it is closed under squaring
    span_full = Subspace(gf2, g.n * g.n, [flat(m) for m in full.matrices])
    span_one = Subspace(gf2, g.n * g.n, [flat(m) for m in one.matrices])
    assert span_full.contains_space(span_one)
    if all(span_one.contains(flat(mat_mul(gf2, m, m, g.n))) for m in one.matrices):
        assert span_one == span_full


def test_restricted_closure_idempotent(gf2):
    g = vect1_derived(gf2)
    cl = restricted_closure(g).algebra
    assert restricted_closure(cl).dim == cl.n


def test_graded_closure_of_vect1_derived(gf2):
    g = vect1_derived(gf2)
    split = grade_mod2(g)
    cl = minimal_graded_closure(g, split)
    assert cl.dim > g.n
    added = cl.tags[g.n:]
    assert added and all(t == 0 for t in added)
    assert minimal_graded_closure(g, [0] * g.n).dim == g.n


def test_closure_refuses_center(gf2):
    with pytest.raises(HasCenter):
        restricted_closure(catalog.gl(2, gf2))


def test_centerless_witness_unique(gf2):
    for g in (catalog.psl(3, gf2), catalog.vect(2, [1, 1], 0, gf2)):
        assert find_p_structure(g).ambiguity == 0


@pytest.mark.parametrize("n", [1, 2, 3])
def test_vect_Ns_witness_is_toral(gf2, n):
    g = catalog.vect(n, [1] * n, 0, gf2)
    w = find_p_structure(g)
    for i, nm in enumerate(g.names):
        toral = any(nm == f"x{k}*d_x{k}" for k in range(1, n + 1))
        assert w.low[i] == (g.basis(i) if toral else g.zero()), nm


def test_solver_deterministic(data_dir):
    a = catalog.load_algebra_file(data_dir / "br2_eps.alg")
    b = catalog.load_algebra_file(data_dir / "br2_eps.alg")
    assert find_p_structure(a).to_json(a) == find_p_structure(b).to_json(b)


@pytest.mark.parametrize("build", [
    lambda F: catalog.vect(1, [1], 0, F),
    lambda F: catalog.vect(2, [1, 1], 0, F),
    lambda F: catalog.h_B(4, [1] * 4, F, "Pi"),
    lambda F: catalog.h_B(3, [1] * 3, F, "I"),
])
def test_deform_keeps_restrictedness(gf2, build):
    g = build(gf2)
    d = catalog.deform_onebarx(g)
    assert d.n == g.n
    if find_p_structure(g) is not None:
        assert find_p_structure(d) is not None


def test_witness_json_round_trip(gf2):
    g = catalog.psl(3, gf2)
    w = find_p_structure(g)
    back = catalog.witness_from_json(g, w.to_json(g))
    assert isinstance(back, StructureWitness) and back.low == w.low
