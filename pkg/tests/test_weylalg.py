import itertools

import pytest
from hypothesis import given, settings

from gaudin_duality._sparse import AlgebraMismatch, add_into
from gaudin_duality.weylalg import WeylAlgebra, WeylProfile, weyl_act, weyl_commutator, weyl_gr, weyl_mul

from strategies import PROFILES, weyl_elements, weyl_keys

P = WeylProfile(2, p=1, q=1, m=1, n=1)
x, dx = P.x(1, 1), P.dx(1, 1)
y2, dy2 = P.y(1, 2), P.dy(1, 2)
one = P.weyl.one()


def test_boson_relation():
    assert weyl_mul(dx, x) == x * dx + one


def test_fermion_relation():
    # y^1_2 is odd since r = 2 > p
    assert dy2 * y2 == -(y2 * dy2) + one
    assert (y2 * y2).is_zero()


def test_number_operator_square():
    n = x * dx
    assert n * n == x * x * dx * dx + n


def test_commutators():
    assert weyl_commutator(dx, x) == one
    assert weyl_commutator(x, P.x(2, 1)).is_zero()
    a, b = P.x(1, 1) * P.dx(2, 1), P.x(2, 1) * P.dx(1, 1)
    assert weyl_commutator(a, b) == P.x(1, 1) * P.dx(1, 1) - P.x(2, 1) * P.dx(2, 1)


def _fock_monomials(prof, max_deg):
    F = prof.fock
    gens = [F.gen(*g.label) for g in prof.variables]
    out = [F.one()]
    for deg in range(1, max_deg + 1):
        for combo in itertools.combinations_with_replacement(range(len(gens)), deg):
            f = F.one()
            for i in combo:
                f = f * gens[i]
            if not f.is_zero():
                out.append(f)
    return out


def test_commutator_checked_by_action():
    a, b = P.x(1, 1) * P.dx(2, 1), P.x(2, 1) * P.dx(1, 1)
    expected = P.x(1, 1) * P.dx(1, 1) - P.x(2, 1) * P.dx(2, 1)
    for f in _fock_monomials(P, 2):
        lhs = weyl_act(a, weyl_act(b, f)) - weyl_act(b, weyl_act(a, f))
        assert lhs == weyl_act(expected, f)


def test_action_examples():
    F = P.fock
    x1 = F.gen("x", 1, 1)
    assert weyl_act(dx, x1 * x1 * x1) == 3 * x1 * x1
    assert weyl_act(x, F.one()) == x1
    ys, yr = F.gen("y", 2, 2), F.gen("y", 1, 2)
    assert weyl_act(dy2, ys * yr) == -ys


def test_symbol_map():
    cl = P.classical
    assert weyl_gr(x * dx + one, 2) == cl.gen("x", 1, 1) * cl.gen("px", 1, 1)
    assert weyl_gr(dx, 1) == cl.gen("px", 1, 1)
    with pytest.raises(ValueError):
        weyl_gr(x * x * dx, 2)


def test_profile_mismatch():
    other = WeylProfile(1, 0, 0, 1, 0)
    with pytest.raises(AlgebraMismatch):
        weyl_mul(x, other.x(1, 1))


def test_exponent_overflow_detected():
    with pytest.raises(OverflowError):
        WeylAlgebra.pack([(0, 1 << 16)])


@pytest.mark.parametrize("prof", PROFILES, ids=repr)
def test_packed_product_matches_stepwise_oracle(prof):
    # the stepwise oracle pushes one letter at a time through the normal order
    W = prof.weyl

    @settings(max_examples=300, deadline=None)
    @given(weyl_keys(prof), weyl_keys(prof))
    def check(a, b):
        merged = {}
        for k, v in W.monomial_product_stepwise(a, b):
            add_into(merged, k, v)
        assert dict(W.monomial_product(a, b)) == merged

    check()


@pytest.mark.parametrize("prof", PROFILES, ids=repr)
def test_associative(prof):
    @settings(max_examples=40, deadline=None)
    @given(weyl_elements(prof), weyl_elements(prof), weyl_elements(prof))
    def check(a, b, c):
        assert (a * b) * c == a * (b * c)

    check()


@settings(max_examples=40, deadline=None)
@given(weyl_elements(PROFILES[0], 2), weyl_elements(PROFILES[0], 2))
def test_action_is_a_representation(a, b):
    for f in _fock_monomials(PROFILES[0], 2)[:12]:
        assert weyl_act(a * b, f) == weyl_act(a, weyl_act(b, f))
