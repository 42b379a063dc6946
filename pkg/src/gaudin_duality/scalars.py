"""Exact rational scalars.

Coefficients are kept as plain ``int`` whenever they are integral and as
``gmpy2.mpq`` otherwise (``fractions.Fraction`` if gmpy2 is unavailable); all
of these are exact and interoperate.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb, factorial
from typing import Union

try:
    from gmpy2 import mpq, mpz
except ImportError:  # pragma: no cover - exercised only without gmpy2
    mpq, mpz = Fraction, int

Rational = Union[int, Fraction, "mpq"]


def Q(x) -> Rational:
    """Coerce ``x`` (int, Fraction, or ``"num/den"`` string) to a normalized rational."""
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return x
    if isinstance(x, (Fraction, mpq)):
        return int(x.numerator) if x.denominator == 1 else mpq(x.numerator, x.denominator)
    if isinstance(x, mpz):
        return int(x)
    if isinstance(x, str):
        return Q(Fraction(x.strip()))
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def ratio(a, b) -> Rational:
    """Exact quotient a / b of rationals."""
    return Q(mpq(a) / b)


def inv(c: Rational) -> Rational:
    if c == 0:
        raise ZeroDivisionError("scalar 0 is not invertible")
    if c == 1 or c == -1:
        return int(c)
    return ratio(1, c)


def to_str(c: Rational) -> str:
    c = Q(c)
    if isinstance(c, int):
        return str(c)
    return f"{c.numerator}/{c.denominator}"


def binom(n: int, k: int) -> int:
    """Generalized binomial n(n-1)...(n-k+1)/k! for any integer n and k >= 0."""
    if k < 0:
        return 0
    if n >= 0:
        return comb(n, k) if k <= n else 0
    # (-1)^k C(k-n-1, k)
    return (-1) ** k * comb(k - n - 1, k)


def falling_contraction(i: int, j: int, k: int) -> int:
    """binom(i, k) * binom(j, k) * k!, the weight of the k-fold contraction
    when a power of the derivative is moved past a power of the variable."""
    return binom(i, k) * binom(j, k) * factorial(k)
