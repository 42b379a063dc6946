import random

import pytest

from gaudin_duality.envalg import PBWAlgebra, make_gld
from gaudin_duality.gaudin import GaudinSetup, SingularityData, build_Ld
from gaudin_duality.ncmatrix import (AlgebraEntries, PsdoEntries, QuasiminorError, TypedMatrix, berezinian,
                                     berezinian_suite, cdet, check_jordan_inverse, is_manin, jordan_block,
                                     matrix_inverse, permute, quasideterminant, random_supercommutative_matrix,
                                     rdet, schur_factor_lower, schur_factor_upper)
from gaudin_duality.ncmatrix import _agree, _gaudin_manin, _supercommutative_setup
from gaudin_duality.psdo import QQ, NotInvertible, PsdoRing, compare, psdo_invert
from gaudin_duality.scalars import Q, ratio

from strategies import mixed_algebra

ALG = mixed_algebra()
a1, a2 = ALG.gen("a", 0, 1), ALG.gen("a", 0, 2)


def test_identity_determinants():
    I = TypedMatrix([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert cdet(I) == 1 and rdet(I) == 1


def test_commutative_2x2():
    ops = AlgebraEntries(ALG)
    a, b, c, d = a1, a2, a1 * a2, a1 + 3
    A = TypedMatrix([[a, b], [c, d]], ops=ops)
    assert cdet(A) == a * d - c * b
    assert rdet(A) == cdet(A)


def test_cdet_over_enveloping_algebra_matches_hand_expansion():
    U = PBWAlgebra(make_gld(2))
    R = PsdoRing(U, -4, -4)
    e = lambda i, j: R.const(U.gen(("e", i, j)))
    A = TypedMatrix([[R.d() + e(1, 1), e(1, 2)], [e(2, 1), R.d() + e(2, 2)]], ops=PsdoEntries(R))
    # column determinant: factors ordered by column index
    hand = A[0, 0] * A[1, 1] - A[1, 0] * A[0, 1]
    assert cdet(A) == hand
    assert cdet(A) != A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]


def test_quasideterminants():
    R = PsdoRing(QQ, -6, -6, commutative=True)
    ops = PsdoEntries(R)
    x = R.element({(1, 0): 1, (0, 0): 2})
    assert quasideterminant(TypedMatrix([[x]], ops=ops), 0, 0) == x
    a11, a12, a21, a22 = x, R.element({(0, 1): 1}), R.const(3), R.element({(1, 0): 1, (0, 0): -1})
    A = TypedMatrix([[a11, a12], [a21, a22]], ops=ops)
    expected = a11 - a12 * psdo_invert(a22) * a21
    _, bad = compare(quasideterminant(A, 0, 0), expected)
    assert not bad


def test_quasideterminant_needs_invertible_pivot():
    A = TypedMatrix([[1, 2], [3, 0]])
    with pytest.raises(NotInvertible):
        quasideterminant(A, 0, 0)


def test_berezinian_of_identity_any_type():
    for s in [(0, 1), (1, 0, 1), (1, 1)]:
        n = len(s)
        I = TypedMatrix([[int(i == j) for j in range(n)] for i in range(n)], s)
        assert berezinian(I) == 1


def _supercommutative(seed, s):
    ring, evens, odds = _supercommutative_setup(-5)
    return random_supercommutative_matrix(random.Random(seed), ring, s, evens, odds)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_odd_type_berezinian_is_inverse_determinant(n):
    A = _supercommutative(n, [1] * n)
    ok, count, _ = _agree(berezinian(A), psdo_invert(cdet(A)))
    assert ok and count > 0


@pytest.mark.parametrize("m", [1, 2, 3])
def test_even_type_manin_berezinian_is_cdet(m):
    A = _gaudin_manin(random.Random(m), -5, [0] * m)
    ok, count, _ = _agree(berezinian(A), cdet(A))
    assert ok and count > 0


def test_manin_examples():
    assert is_manin(_supercommutative(1, [0, 1, 0]))[0]
    setup = GaudinSetup(make_gld(2), SingularityData.make([Q(0), Q(1)], [1, 2]), -4, -4)
    L = build_Ld(2, None, setup)
    assert is_manin(L)[0]
    ok, witness = is_manin(L.transpose())
    assert not ok and witness is not None


def test_corrupted_entry_is_not_manin():
    A = _gaudin_manin(random.Random(5), -5, [0, 0])
    U = A.ops.ring.coeffs
    lab = U.lie.labels[0]
    rows = [list(r) for r in A.rows]
    rows[0][1] = rows[0][1] + A.ops.ring.const(U.gen(lab))
    ok, witness = is_manin(A.like(rows))
    assert not ok and witness


def test_block_diagonal_factorization():
    R = PsdoRing(QQ, -6, -6, commutative=True)
    ops = PsdoEntries(R)
    x = R.element({(1, 0): 1, (0, 0): 2})
    y = R.element({(0, 1): 1, (0, 0): 5})
    zero = R.zero()
    A = TypedMatrix([[x, zero], [zero, y]], (0, 1), ops)
    ber_w, ber_rest = schur_factor_lower(A, 1)
    assert compare(ber_w, x)[1] == []
    assert compare(ber_rest, psdo_invert(y))[1] == []
    assert compare(berezinian(A), x * psdo_invert(y))[1] == []


def test_random_mixed_factorizations():
    A = _supercommutative(11, [0, 0, 1])
    B = berezinian(A)
    for k in (1, 2):
        lo = schur_factor_lower(A, k)
        up = schur_factor_upper(A, k)
        assert _agree(lo[0] * lo[1], B)[0]
        assert _agree(up[0] * up[1], B)[0]


def test_permutation_invariance_and_its_control():
    A = _gaudin_manin(random.Random(3), -5, [0, 1])
    assert permute(A, [0, 1]).rows == A.rows
    assert _agree(berezinian(permute(A, [1, 0])), berezinian(A))[0]
    # the transpose is not Manin and the identity fails for it
    At = A.transpose()
    assert not _agree(berezinian(permute(At, [1, 0])), berezinian(At))[0]


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_jordan_inverse(k):
    lam = Q("-3/2")
    assert check_jordan_inverse(k, lam)
    J = jordan_block(k, -lam)
    inv = matrix_inverse(TypedMatrix([[-x for x in row] for row in J])).rows
    assert inv[0][k - 1] == ratio(1, lam ** k)


def test_berezinian_suite_small_and_deterministic():
    r1 = berezinian_suite(seed=3, trials=10)
    r2 = berezinian_suite(seed=3, trials=10)
    assert r1 == r2
    assert r1["pass"] and r1["passed"] == 10
    assert {r["kind"] for r in r1["records"]} == {"supercommutative", "gaudin"}
    assert all(r["compared"] > 0 for r in r1["records"])
