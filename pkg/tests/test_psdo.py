import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gaudin_duality.psdo import (NEG_INF, NotInvertible, PrecisionExhausted, PsdoRing, QQ, Window, compare, omega,
                                 psdo_invert, recenter)
from gaudin_duality.scalars import Q

R = PsdoRing(QQ, -8, -8)
z, D = R.z(), R.d()


def test_rule_examples():
    assert D * z == z * D + R.one()
    assert R.monomial(0, -1) * z == z * R.monomial(0, -1) - R.monomial(0, -2)
    assert (z * D).terms == {(1, 1): 1}


def test_inverse_of_shifted_derivative():
    c = Q(3)
    inv = psdo_invert(D - R.const(c))
    for k in range(0, 6):
        assert inv.coefficient(0, -k - 1) == c ** k
    prod = (D - R.const(c)) * inv
    win, bad = compare(prod, R.one())
    assert not bad and win.d_min <= -6


def test_inverse_of_one():
    assert psdo_invert(R.one()) == R.one()


def test_zero_not_invertible():
    with pytest.raises(NotInvertible):
        psdo_invert(R.zero())


def test_coefficient_outside_window():
    inv = psdo_invert(D - R.const(2))
    with pytest.raises(PrecisionExhausted):
        inv.coefficient(0, -20)


def test_omega():
    assert omega(z) == D
    assert omega(z * D) == -(z * D) - R.one()


def test_pole_expansions():
    c = Fraction(2, 3)
    p1 = R.pole_expand(c, 1)
    for j in range(6):
        assert p1.coefficient(-j - 1, 0) == c ** j
    assert R.pole_expand(0, 2).terms == {(-2, 0): 1}
    # 1/(z-c)^2 = -d/dz 1/(z-c), term by term
    p2 = R.pole_expand(c, 2)
    deriv = {(i - 1, 0): -i * v for (i, _), v in p1.terms.items()}
    for key, v in p2.terms.items():
        assert deriv[key] == v


def _act(op, n):
    """Apply a differential operator (D-exponents >= 0) to z^n; z-exponents may be negative."""
    out = {}
    for (i, j), c in op.terms.items():
        f = 1
        for t in range(j):
            f *= n - t
        if f:
            out[i + n - j] = out.get(i + n - j, 0) + c * f
    return {k: v for k, v in out.items() if v}


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(-2, 2), st.integers(0, 2), st.integers(-3, 3)), min_size=1, max_size=4),
       st.lists(st.tuples(st.integers(-2, 2), st.integers(0, 2), st.integers(-3, 3)), min_size=1, max_size=4))
def test_product_matches_composition_of_actions(ta, tb):
    # differential operators act on Laurent monomials; the product must act as the composition
    a = R.element({(i, j): c for i, j, c in ta})
    b = R.element({(i, j): c for i, j, c in tb})
    ab = a * b
    for n in (-3, 5, 7):
        inner = _act(b, n)
        expect = {}
        for k, v in inner.items():
            for kk, vv in _act(a, k).items():
                expect[kk] = expect.get(kk, 0) + v * vv
        assert _act(ab, n) == {k: v for k, v in expect.items() if v}


def test_recenter_moves_a_pole():
    c = Fraction(1, 2)
    u_inv = R.element({(-1, 0): 1}, Window(NEG_INF, -1, NEG_INF, 0))
    shifted = recenter(u_inv, c)
    win, bad = compare(shifted, R.pole_expand(c, 1))
    assert not bad and win.z_min == R.z_floor


def test_recenter_polynomial_is_exact():
    c = Q(2)
    u = R.element({(2, 1): 1, (0, 0): 3})
    out = recenter(u, c)
    # (z - 2)^2 D + 3
    assert out.terms == {(2, 1): 1, (1, 1): -4, (0, 1): 4, (0, 0): 3}


def random_series(rng, ring):
    # every term sits below the corner z^2 D, so the product keeps an invertible lead
    terms = {(rng.randint(-2, 1), rng.randint(-2, 1)): rng.randint(-3, 3) or 1 for _ in range(3)}
    a = ring.element(terms) + ring.monomial(2, 1, rng.randint(1, 3))
    w = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
    a = a * ring.pole_expand(w, rng.randint(1, 2), rng.choice("zd"))
    return a


def _agree(small, big):
    """Coefficients known to both results coincide; returns how many were compared."""
    ws, wb = small.window, big.window
    keys = {k for k in set(small.terms) | set(big.terms) if ws.known(*k) and wb.known(*k)}
    for k in keys:
        assert small.terms.get(k, 0) == big.terms.get(k, 0), k
    return len(keys)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_window_soundness(seed):
    """Enlarging input windows never changes a previously valid coefficient."""
    results = []
    for zf, df in ((-5, -5), (-7, -7), (-9, -14)):
        ring = PsdoRing(QQ, zf, df)
        rng = random.Random(seed)
        a, b = random_series(rng, ring), random_series(rng, ring)
        c = Fraction(rng.randint(-3, 3), 2)
        results.append([a * b, psdo_invert(a), omega(a), recenter(a, c), a + b * b])
    for small, mid, ref in zip(*results):
        assert _agree(small, ref) > 0
        assert _agree(mid, ref) > 0
        _agree(small, mid)
