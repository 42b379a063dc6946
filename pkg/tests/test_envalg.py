import random

import pytest
from hypothesis import given, settings, strategies as st

from gaudin_duality._sparse import AlgebraMismatch
from gaudin_duality.envalg import (LieSuperData, PBWAlgebra, evaluation_map, gl_parity, loop_bracket, make_gl,
                                   make_gld, make_takiff_sum, pbw_commutator, pbw_mul)
from gaudin_duality.scalars import Q

GL2 = make_gld(2)
U2 = PBWAlgebra(GL2)
GL11 = make_gl(0, 0, 1, 1)
U11 = PBWAlgebra(GL11)


def e(a, b):
    return U2.gen(("e", a, b))


def E(i, j):
    return U11.gen(("E", i, j))


def test_gl2_bracket():
    assert GL2.bracket(("e", 1, 2), ("e", 2, 1)) == {("e", 1, 1): 1, ("e", 2, 2): -1}


def test_gl11_odd_anticommutator():
    assert GL11.bracket(("E", 1, 2), ("E", 2, 1)) == {("E", 1, 1): 1, ("E", 2, 2): 1}


def test_even_self_bracket_vanishes():
    for lab in GL11.labels:
        if not GL11.parity(lab):
            assert not GL11.bracket(lab, lab)


def test_parity_function():
    # gl_{p+m|q+n} with blocks p, q, m, n in that order
    assert [gl_parity(1, 1, 1, 1, i) for i in range(1, 5)] == [0, 1, 0, 1]


def test_all_zero_sizes_rejected():
    with pytest.raises(ValueError):
        make_gl(0, 0, 0, 0)


def test_broken_jacobi_rejected():
    labels = ["a", "b", "c"]
    with pytest.raises(ValueError):
        LieSuperData(labels, [0, 0, 0], {("a", "b"): {"c": 1}, ("b", "c"): {"a": 1}, ("c", "a"): {"c": 1}})


def test_takiff_truncation_and_direct_sum():
    T = make_takiff_sum(GL2, [Q(0), Q(1)], [2, 1])
    # t * t = t^2 = 0 at an order-2 site
    assert not T.bracket((0, ("e", 1, 2), 1), (0, ("e", 2, 1), 1))
    assert T.bracket((0, ("e", 1, 2), 0), (0, ("e", 2, 1), 1)) == {(0, ("e", 1, 1), 1): 1, (0, ("e", 2, 2), 1): -1}
    assert not T.bracket((0, ("e", 1, 2), 0), (1, ("e", 2, 1), 0))


def test_pbw_reordering():
    assert e(2, 1) * e(1, 2) == e(1, 2) * e(2, 1) - e(1, 1) + e(2, 2)


def test_pbw_reordering_in_a_representation():
    # the defining 2x2 representation is faithful on the degree-2 relation
    mats = {(a, b): [[int(i == a and j == b) for j in (1, 2)] for i in (1, 2)] for a in (1, 2) for b in (1, 2)}

    def mm(A, B):
        return [[sum(A[i][k] * B[k][j] for k in range(2)) for j in range(2)] for i in range(2)]

    def rep(elem):
        out = [[0, 0], [0, 0]]
        for key, c in elem.terms.items():
            M = [[1, 0], [0, 1]]
            for idx in key:
                M = mm(M, mats[GL2.labels[idx][1:]])
            out = [[out[i][j] + c * M[i][j] for j in range(2)] for i in range(2)]
        return out

    assert rep(e(2, 1) * e(1, 2)) == mm(mats[(2, 1)], mats[(1, 2)])


def test_odd_square_is_half_bracket():
    assert E(1, 2) * E(1, 2) == U11.zero()
    # E12 + E21 squares to half its self-bracket, the identity
    v = E(1, 2) + E(2, 1)
    assert v * v == E(1, 1) + E(2, 2)


def test_central_element_merges():
    c = E(1, 1) + E(2, 2)
    for lab in GL11.labels:
        assert pbw_commutator(c, U11.gen(lab)).is_zero()


def test_mismatch():
    with pytest.raises(AlgebraMismatch):
        pbw_mul(e(1, 1), E(1, 1))


def test_evaluation_map():
    T = make_takiff_sum(GL2, [Q(3)], [2])
    U = PBWAlgebra(T)
    lab = ("e", 1, 2)
    assert evaluation_map(U, lab, 0) == U.gen((0, lab, 0))
    assert evaluation_map(U, lab, 2) == 9 * U.gen((0, lab, 0)) + 6 * U.gen((0, lab, 1))
    T1 = make_takiff_sum(GL2, [Q(3)], [1])
    U1 = PBWAlgebra(T1)
    assert evaluation_map(U1, lab, 1) == 3 * U1.gen((0, lab, 0))


@pytest.mark.parametrize("order", [1, 2, 3])
def test_evaluation_map_is_a_homomorphism(order):
    T = make_takiff_sum(GL11, [Q("1/2")], [order])
    U = PBWAlgebra(T)
    for la in GL11.labels:
        for lb in GL11.labels:
            for r in range(3):
                for s in range(3):
                    lhs = pbw_commutator(evaluation_map(U, la, r), evaluation_map(U, lb, s))
                    rhs = U.zero()
                    for (lc, k), c in loop_bracket(GL11, (la, r), (lb, s)).items():
                        rhs = rhs + evaluation_map(U, lc, k) * c
                    assert lhs == rhs


@pytest.mark.parametrize("lie", [make_gl(1, 1, 0, 0), make_takiff_sum(GL11, [Q(0)], [2])], ids=["gl11", "takiff"])
def test_bracket_realized_by_commutator(lie):
    U = PBWAlgebra(lie)
    for la in lie.labels:
        for lb in lie.labels:
            assert pbw_commutator(U.gen(la), U.gen(lb)) == U.from_vector(lie.bracket(la, lb))


def _random_pbw(rng, U, terms=3, deg=3):
    out = U.zero()
    for _ in range(terms):
        t = U.one() * rng.randint(-3, 3)
        for _ in range(rng.randint(0, deg)):
            t = t * U.gen(rng.choice(U.lie.labels))
        out = out + t
    return out


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_pbw_associative(seed):
    rng = random.Random(seed)
    U = PBWAlgebra(make_gl(1, 1, 0, 0))
    a, b, c = (_random_pbw(rng, U) for _ in range(3))
    assert (a * b) * c == a * (b * c)
