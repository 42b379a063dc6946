"""Shared machinery for sparse linear combinations of monomials.

Each algebra (supercommutative polynomials, Weyl superalgebra, PBW envelopes)
stores elements as ``{monomial_key: rational}`` with zero coefficients evicted.
The algebra object owns the monomial product; elements only delegate.
"""

from __future__ import annotations

import hashlib
from typing import Dict, Hashable, Iterable, Tuple

from .scalars import Q, Rational, to_str


class AlgebraMismatch(ValueError):
    """Operands live in different algebras."""


def add_into(acc: Dict, key: Hashable, c: Rational) -> None:
    v = acc.get(key, 0) + c
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


class SparseAlgebra:
    """Base for an algebra whose elements are sparse rational combinations."""

    element_class: type

    def zero(self):
        return self.element_class(self, {})

    def one(self):
        return self.element_class(self, {self.unit_key(): 1})

    def scalar(self, c) -> "SparseElement":
        c = Q(c)
        return self.element_class(self, {self.unit_key(): c} if c else {})

    # ring protocol used by the psdo and matrix layers
    def is_zero(self, x) -> bool:
        return not x.terms

    def scalar_value(self, x):
        """The rational ``c`` if ``x == c * 1``, else ``None``."""
        if not x.terms:
            return 0
        if len(x.terms) == 1:
            (k, v), = x.terms.items()
            if k == self.unit_key():
                return v
        return None

    def parity_parts(self, x) -> Dict[int, "SparseElement"]:
        parts: Dict[int, Dict] = {}
        for k, v in x.terms.items():
            parts.setdefault(self.monomial_parity(k), {})[k] = v
        return {p: self.element_class(self, t) for p, t in parts.items()}

    def multiply(self, a: "SparseElement", b: "SparseElement") -> "SparseElement":
        out: Dict = {}
        mono_mul = self.monomial_product
        for ka, va in a.terms.items():
            for kb, vb in b.terms.items():
                c = va * vb
                for key, w in mono_mul(ka, kb):
                    add_into(out, key, c * w)
        return self.element_class(self, out)

    # to be supplied by subclasses
    def unit_key(self) -> Hashable:
        raise NotImplementedError

    def monomial_product(self, ka, kb) -> Iterable[Tuple[Hashable, Rational]]:
        raise NotImplementedError

    def monomial_parity(self, key) -> int:
        raise NotImplementedError

    def monomial_degree(self, key) -> int:
        raise NotImplementedError

    def format_monomial(self, key) -> str:
        raise NotImplementedError


class SparseElement:
    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: SparseAlgebra, terms: Dict):
        self.algebra = algebra
        self.terms = terms

    def _check(self, other: "SparseElement") -> None:
        if other.algebra is not self.algebra and other.algebra != self.algebra:
            raise AlgebraMismatch(f"{self.algebra!r} vs {other.algebra!r}")

    def _coerce(self, other):
        if isinstance(other, SparseElement):
            self._check(other)
            return other
        return self.algebra.scalar(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            add_into(out, k, v)
        return type(self)(self.algebra, out)

    __radd__ = __add__

    def __neg__(self):
        return type(self)(self.algebra, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, SparseElement):
            self._check(other)
            return self.algebra.multiply(self, other)
        c = Q(other)
        if not c:
            return self.algebra.zero()
        return type(self)(self.algebra, {k: v * c for k, v in self.terms.items()})

    def __rmul__(self, other):
        c = Q(other)
        if not c:
            return self.algebra.zero()
        return type(self)(self.algebra, {k: c * v for k, v in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, SparseElement):
            return self.algebra == other.algebra and self.terms == other.terms
        try:
            return self == self.algebra.scalar(other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def parity(self) -> int:
        """Parity of a homogeneous element (0 for zero); raises if mixed."""
        ps = {self.algebra.monomial_parity(k) for k in self.terms}
        if len(ps) > 1:
            raise ValueError("element is not homogeneous")
        return ps.pop() if ps else 0

    def degree(self) -> int:
        """Total generator degree (-1 for zero)."""
        return max((self.algebra.monomial_degree(k) for k in self.terms), default=-1)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: self.algebra.sort_key(kv[0]))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for k, v in self.sorted_terms():
            mono = self.algebra.format_monomial(k)
            if not mono:
                parts.append(to_str(v))
            elif v == 1:
                parts.append(mono)
            elif v == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{to_str(v)}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__

    def digest(self) -> str:
        """Stable content hash, independent of dict order and process."""
        return hashlib.sha256(str(self).encode()).hexdigest()[:16]


def supercommutator(a, b):
    """[a, b] = ab - (-1)^{|a||b|} ba, extended bilinearly over parity components.

    Works for any element type whose algebra implements ``parity_parts``.
    """
    alg = a.algebra
    pa = alg.parity_parts(a)
    pb = alg.parity_parts(b)
    out = alg.zero()
    for i, x in pa.items():
        for j, y in pb.items():
            if i and j:
                out = out + (x * y + y * x)
            else:
                out = out + (x * y - y * x)
    return out
