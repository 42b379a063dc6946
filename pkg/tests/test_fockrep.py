from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from gaudin_duality.duality import DualityScenario, FockImages
from gaudin_duality.fockrep import (GeneratorMatrix, LeakageError, check_spectral_claims, charpoly, dual_weights,
                                    enumerate_dual_space, enumerate_weight_space, is_diagonalizable, is_squarefree,
                                    krylov_dimension, poly_gcd, restrict, spectrum_scenarios, spectrum_suite,
                                    weight_decomposition)

X = sympy.Symbol("x")
small = st.fractions(min_value=-5, max_value=5, max_denominator=3)


def _as_sympy(coeffs):
    return sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in coeffs], X)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5).flatmap(lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)))
def test_charpoly_matches_sympy(A):
    expected = sympy.Matrix(A).charpoly(X)
    assert _as_sympy(charpoly(A)).all_coeffs() == sympy.Poly(expected.as_expr(), X).all_coeffs()


@settings(max_examples=60, deadline=None)
@given(st.lists(small, min_size=1, max_size=5), st.lists(small, min_size=1, max_size=5))
def test_gcd_matches_sympy(a, b):
    g = poly_gcd(a, b)
    expected = sympy.gcd(_as_sympy(a), _as_sympy(b))
    if not g:
        assert expected.is_zero
    else:
        assert _as_sympy(g).all_coeffs() == expected.monic().all_coeffs()


def test_squarefree_and_diagonalizable():
    assert is_squarefree([1, 0, -1])
    assert not is_squarefree([1, -2, 1])
    F = Fraction
    assert is_diagonalizable([[F(1), F(0)], [F(0), F(1)]])
    assert not is_diagonalizable([[F(1), F(1)], [F(0), F(1)]])


def test_cyclic_vector_for_diagonal_pair():
    F = Fraction
    A = GeneratorMatrix([[F(1), F(0)], [F(0), F(2)]], "a")
    B = GeneratorMatrix([[F(3), F(0)], [F(0), F(5)]], "b")
    assert krylov_dimension([A, B], [1, 0]) == 1
    assert krylov_dimension([A, B], [1, 1]) == 2
    rep = check_spectral_claims([A, B])
    assert rep["commute"] and rep["simple_spectrum"]
    assert rep["cyclic_vector"]["kind"] == "ones"


def test_spectral_claims_detect_failures():
    F = Fraction
    A = GeneratorMatrix([[F(0), F(1)], [F(0), F(0)]], "n")
    B = GeneratorMatrix([[F(0), F(0)], [F(1), F(0)]], "m")
    rep = check_spectral_claims([A, B])
    assert not rep["commute"] and rep["commute_witness"] == {"a": "n", "b": "m"}
    scalar = GeneratorMatrix([[F(2), F(0)], [F(0), F(2)]], "c")
    rep = check_spectral_claims([scalar], retries=2)
    assert not rep["cyclic"] and not rep["simple_spectrum"] and rep["resamples"] == 2


def _scenario():
    return DualityScenario(2, p=1, m=1, xi=[1, 1], gamma=[1, 1], w=[Fraction(1), Fraction(3)],
                           z=[Fraction(-2), Fraction(5)])


def test_weight_spaces_from_both_sides_agree():
    sc = _scenario()
    images = FockImages(sc)
    groups = weight_decomposition(sc, 4, images)
    assert len(groups) > 5
    N = sc.p + sc.q + sc.m + sc.n
    checked = 0
    for (k, mu), monos in groups.items():
        mu_map = {r: mu[r - 1] for r in range(1, N + 1)}
        basis = enumerate_weight_space(sc, k, mu_map, images=images)
        assert set(monos) <= set(basis.monomials)
        dual = enumerate_dual_space(sc, k, dual_weights(sc, mu_map), images=images)
        assert set(dual) == set(basis.monomials)
        checked += 1
    assert checked == len(groups)


def test_dual_weights_shift_y_columns_only():
    sc = _scenario()
    assert dual_weights(sc, {1: -3, 2: 2}) == {1: -1, 2: 2}


def test_restriction_detects_leakage():
    sc = _scenario()
    P = sc.profile
    basis = enumerate_weight_space(sc, (1, 0), {1: -2, 2: 1})
    assert basis.dim >= 1
    with pytest.raises(LeakageError):
        restrict(P.x(1, 1), basis)


def test_spectrum_suite():
    rep = spectrum_suite(0)
    assert rep["pass"]
    assert rep["simple_spectrum_spaces"] >= 3
    for space in rep["spaces"]:
        assert 2 <= space["dim"] <= 16
        assert space["dual_basis_equal"] and space["spectral"]["commute"] and space["spectral"]["cyclic"]
        if not space["simple_spectrum_required"]:
            # a nilpotent centralizer makes some generator non-diagonalizable
            assert space["non_diagonalizable_generator"]
    assert [sc.name for sc in spectrum_scenarios(0)] == ["spectrum_xi11", "spectrum_xi2"]
