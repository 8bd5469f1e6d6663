import pytest

from lieforge import catalog
from lieforge.errors import NotSimpleInput
from lieforge.ffield import ff_make
from lieforge.linalg import Subspace
from lieforge.restrict import find_p2p_structure, find_p_structure, verify_witness
from lieforge.superalg import (
    algebra_from_constants,
    bracket_span,
    check_axioms,
    derived,
    is_ideal,
    is_simple,
    odd_squares_span,
    subalgebra,
)
from lieforge.superize import (
    block_split,
    classify_origin,
    desuperize,
    matrix_units,
    method2,
    partial_queerify,
    queerify_assoc,
    queerify_restricted,
)


@pytest.fixture(scope="module")
def F2():
    return ff_make(2)


@pytest.fixture(scope="module")
def q_psl3(F2):
    return queerify_restricted(catalog.psl(3, F2))


@pytest.fixture(scope="module")
def s_psl4(F2):
    g = catalog.psl(4, F2)
    return method2(g, block_split(g, [0, 0, 1, 1]))


def lemma_l1_ideal(g):
    odd = Subspace(g.ctx, g.n, [g.basis(i) for i in g.odd])
    return bracket_span(g, odd, odd) + odd_squares_span(g, odd) + odd


def test_queerify_mat2_gf3():
    F = ff_make(3)
    names, mult = matrix_units(2, F)
    qa = queerify_assoc(F, names, mult)
    assert qa.sdim == (4, 4) and check_axioms(qa).ok
    sq2 = catalog.sq(2, F)
    for i in range(sq2.n):
        assert catalog.qtr(sq2, sq2.basis(i)) == 0
    q2 = catalog.q(2, F)
    assert any(catalog.qtr(q2, q2.basis(i)) for i in range(q2.n))


def test_queerify_one_dimensional(F2):
    q1 = queerify_assoc(F2, ["1"], [[[1]]])
    assert q1.sdim == (1, 1)
    assert q1.square(q1.vec("Pi(1)")) == q1.vec("1")


def test_queerify_mat2_gf2_odd_bracket(F2):
    names, mult = matrix_units(2, F2)
    qa = queerify_assoc(F2, names, mult)
    lhs = qa.bracket(qa.vec("Pi(E12)"), qa.vec("Pi(E21)"))
    assert lhs == qa.vec({"E11": 1, "E22": 1})
    assert check_axioms(qa).ok


@pytest.mark.parametrize("n", [2, 3])
def test_queerify_assoc_matches_q_family(F2, n):
    names, mult = matrix_units(n, F2)
    qa = queerify_assoc(F2, names, mult)
    qn = catalog.q(n, F2)
    assert qa.names == qn.names
    assert qa.table == qn.table and qa.squares == qn.squares


def test_q_psl3(q_psl3):
    assert q_psl3.sdim == (8, 8)
    assert is_simple(q_psl3).simple
    w = find_p2p_structure(q_psl3)
    assert w is not None and not verify_witness(q_psl3, w)


def test_q_of_abelian(F2):
    g = algebra_from_constants(F2, ["a", "b"], [0, 0], [])
    qg = queerify_restricted(g)
    assert qg.is_abelian()
    assert not is_simple(qg).simple


def test_partial_queerify_of_restricted_is_q(F2, q_psl3):
    pq = partial_queerify(catalog.psl(3, F2))
    assert pq.sdim == q_psl3.sdim
    assert pq.table == q_psl3.table and pq.squares == q_psl3.squares


def test_partial_queerify_zd5(F2):
    pq = partial_queerify(catalog.zd(5, F2))
    assert pq.sdim == (14, 10)
    assert is_simple(pq).simple


def test_partial_queerify_requires_simple(F2):
    with pytest.raises(NotSimpleInput):
        partial_queerify(catalog.gl(2, F2))


def test_method2_psl4_blocks(s_psl4):
    assert s_psl4.sdim == (6, 8)
    assert is_simple(s_psl4).simple
    assert is_ideal(s_psl4, lemma_l1_ideal(s_psl4))


def test_desuperize(F2):
    ab = algebra_from_constants(F2, ["x", "y"], [1, 1], [], squares={})
    assert desuperize(ab).is_abelian()
    oo = catalog.oo1_IPi_1_2(F2)
    Fo = desuperize(oo)
    assert Fo.n == 5 and Fo.dim_odd == 0 and check_axioms(Fo).ok


def test_desuperize_carries_2_structure(q_psl3):
    w = find_p2p_structure(q_psl3)
    Fq = desuperize(q_psl3, w)
    assert not verify_witness(Fq, Fq.witness)
    assert find_p_structure(Fq) is not None


def test_classify_q_psl3(q_psl3):
    cert = classify_origin(q_psl3)
    assert cert.verdict == "partial-queerification"
    assert (cert.h_even.dim, cert.h_odd.dim) == (8, 8)
    assert cert.search_complete and cert.bijections


def test_classify_method2(s_psl4):
    cert = classify_origin(s_psl4)
    assert cert.verdict == "method-2"
    assert (cert.h_even.dim, cert.h_odd.dim) == (6, 8)
    assert cert.h.n == s_psl4.n


def test_classify_partial_queerification_of_zd5(F2):
    pq = partial_queerify(catalog.zd(5, F2))
    cert = classify_origin(pq)
    assert cert.verdict == "partial-queerification"
    assert (cert.h_even.dim, cert.h_odd.dim) == (10, 10)


def test_lemma_l1_on_queer_outputs(q_psl3):
    assert is_ideal(q_psl3, lemma_l1_ideal(q_psl3))


def test_even_trace(F2):
    sq3 = catalog.sq(3, F2)
    q3 = catalog.q(3, F2)
    d_sq = derived(sq3, 1)
    d_q = derived(q3, 1)
    assert all(catalog.etr(sq3, v) == 0 for v in d_sq.basis)
    assert any(catalog.etr(q3, v) for v in d_q.basis)


def test_o_pi6_second_derived_partial_queerification(F2):
    op = catalog.o_Pi(6, F2)
    g = subalgebra(op, derived(op, 2))
    assert find_p_structure(g) is not None
    pq = partial_queerify(g)
    assert pq.sdim == (g.n, g.n)
