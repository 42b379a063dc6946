"""Supercommutative polynomial superalgebras with optional Poisson structure.

A monomial is a tuple of ``(generator_index, exponent)`` pairs sorted by
generator index; odd generators carry exponent 1.  Generators are ordered by
``(kind, a, index)`` so the canonical form does not depend on construction
order.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from ._sparse import AlgebraMismatch, SparseAlgebra, SparseElement, add_into


class Generator(NamedTuple):
    kind: str
    a: int
    index: int
    parity: int
    name: str = ""

    @property
    def label(self):
        return (self.kind, self.a, self.index)

    def display(self) -> str:
        return self.name or f"{self.kind}{self.a}_{self.index}"


Monomial = Tuple[Tuple[int, int], ...]


class SuperPoly(SparseElement):
    __slots__ = ()

    def bracket(self, other: "SuperPoly") -> "SuperPoly":
        return poisson_bracket(self, other)


class SuperPolyAlgebra(SparseAlgebra):
    """Free supercommutative algebra on a finite set of generators.

    ``brackets`` optionally maps a pair of generator labels to an element
    (or something ``element()`` accepts) giving the Poisson bracket of the two
    generators; unlisted pairs bracket to zero.
    """

    element_class = SuperPoly

    def __init__(self, generators: Iterable[Generator], brackets: Optional[dict] = None):
        gens = sorted(generators, key=lambda g: g.label)
        labels = [g.label for g in gens]
        if len(set(labels)) != len(labels):
            raise ValueError("generator labels must be unique")
        self.generators: Tuple[Generator, ...] = tuple(gens)
        self.index_of = {g.label: i for i, g in enumerate(gens)}
        self.parities = tuple(g.parity for g in gens)
        self._key = tuple((g.label, g.parity) for g in gens)
        self._raw_brackets = brackets or {}
        self._bracket_table: Optional[Dict[Tuple[int, int], SuperPoly]] = None
        self._mono_cache: Dict = {}
        self._pb_cache: Dict = {}

    def __eq__(self, other):
        return isinstance(other, SuperPolyAlgebra) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"SuperPolyAlgebra({len(self.generators)} generators)"

    # construction helpers
    def gen(self, kind, a=0, index=0) -> SuperPoly:
        try:
            i = self.index_of[(kind, a, index)]
        except KeyError:
            raise KeyError(f"no generator {(kind, a, index)!r}") from None
        return SuperPoly(self, {((i, 1),): 1})

    def monomial(self, powers: Dict) -> SuperPoly:
        """Element with coefficient 1 from ``{label: exponent}``; odd squares give 0."""
        items = []
        for label, e in powers.items():
            if e < 0:
                raise ValueError("negative exponent")
            if e == 0:
                continue
            i = self.index_of[label]
            if self.parities[i] and e > 1:
                return self.zero()
            items.append((i, e))
        return SuperPoly(self, {tuple(sorted(items)): 1})

    # SparseAlgebra protocol
    def unit_key(self):
        return ()

    def monomial_parity(self, key: Monomial) -> int:
        par = self.parities
        return sum(e for i, e in key if par[i]) & 1

    def monomial_degree(self, key: Monomial) -> int:
        return sum(e for _, e in key)

    def sort_key(self, key: Monomial):
        return (self.monomial_degree(key), key)

    def format_monomial(self, key: Monomial) -> str:
        out = []
        for i, e in key:
            s = self.generators[i].display()
            out.append(s if e == 1 else f"{s}^{e}")
        return "*".join(out)

    def monomial_product(self, ka: Monomial, kb: Monomial):
        cache = self._mono_cache
        hit = cache.get((ka, kb))
        if hit is None:
            hit = self._merge(ka, kb)
            cache[(ka, kb)] = hit
        return hit

    def _merge(self, ka: Monomial, kb: Monomial):
        par = self.parities
        if not ka:
            return ((kb, 1),)
        if not kb:
            return ((ka, 1),)
        out: List[Tuple[int, int]] = []
        sign = 0
        odd_a_pending = sum(1 for i, _ in ka if par[i])
        ia = ib = 0
        while ia < len(ka) and ib < len(kb):
            ga, ea = ka[ia]
            gb, eb = kb[ib]
            if ga < gb:
                out.append(ka[ia])
                if par[ga]:
                    odd_a_pending -= 1
                ia += 1
            elif gb < ga:
                # b's generator jumps over every odd factor of a not yet emitted
                if par[gb]:
                    sign += odd_a_pending
                out.append(kb[ib])
                ib += 1
            else:
                if par[ga]:
                    return ()
                out.append((ga, ea + eb))
                ia += 1
                ib += 1
        out.extend(ka[ia:])
        out.extend(kb[ib:])
        return ((tuple(out), -1 if sign & 1 else 1),)

    # Poisson structure
    def bracket_table(self) -> Dict[Tuple[int, int], SuperPoly]:
        if self._bracket_table is None:
            tab = {}
            for (la, lb), v in self._raw_brackets.items():
                ia, ib = self.index_of[la], self.index_of[lb]
                v = v if isinstance(v, SuperPoly) else self.scalar(v)
                if v.terms:
                    tab[(ia, ib)] = v
            self._bracket_table = tab
        return self._bracket_table

    def _gen_elem(self, i: int) -> SuperPoly:
        return SuperPoly(self, {((i, 1),): 1})

    def _gen_bracket(self, i: int, j: int) -> SuperPoly:
        tab = self.bracket_table()
        v = tab.get((i, j))
        if v is not None:
            return v
        v = tab.get((j, i))
        if v is not None:
            # superskew
            s = self.parities[i] & self.parities[j]
            return v if s else -v
        return self.zero()

    def _split_first(self, key: Monomial):
        i, e = key[0]
        rest = ((i, e - 1),) + key[1:] if e > 1 else key[1:]
        return i, rest

    def bracket_gen_mono(self, g: int, key: Monomial) -> SuperPoly:
        """{g, M} for a generator g and a monomial M, by the left Leibniz rule."""
        ck = ("g", g, key)
        hit = self._pb_cache.get(ck)
        if hit is not None:
            return hit
        if not key:
            res = self.zero()
        else:
            h, rest = self._split_first(key)
            gh = self._gen_bracket(g, h)
            rest_el = SuperPoly(self, {rest: 1})
            res = gh * rest_el
            inner = self.bracket_gen_mono(g, rest)
            if inner.terms:
                s = -1 if (self.parities[g] and self.parities[h]) else 1
                res = res + s * (self._gen_elem(h) * inner)
        self._pb_cache[ck] = res
        return res

    def bracket_mono(self, ka: Monomial, kb: Monomial) -> SuperPoly:
        """{A, B} for monomials, splitting A = g A' and using the right Leibniz rule
        {gA', B} = g{A', B} + (-1)^{|A'||B|} {g, B} A'."""
        ck = ("m", ka, kb)
        hit = self._pb_cache.get(ck)
        if hit is not None:
            return hit
        if not ka or not kb:
            res = self.zero()
        else:
            g, rest = self._split_first(ka)
            pr, pb = self.monomial_parity(rest), self.monomial_parity(kb)
            rest_el = SuperPoly(self, {rest: 1})
            res = self._gen_elem(g) * self.bracket_mono(rest, kb)
            gb = self.bracket_gen_mono(g, kb)
            if gb.terms:
                s = -1 if (pr and pb) else 1
                res = res + s * (gb * rest_el)
        self._pb_cache[ck] = res
        return res


def spoly_mul(a: SuperPoly, b: SuperPoly) -> SuperPoly:
    if a.algebra != b.algebra:
        raise AlgebraMismatch("operands over different generator sets")
    return a * b


def poisson_bracket(a: SuperPoly, b: SuperPoly) -> SuperPoly:
    alg = a.algebra
    if alg != b.algebra:
        raise AlgebraMismatch("operands over different generator sets")
    out: Dict = {}
    for ka, va in a.terms.items():
        for kb, vb in b.terms.items():
            c = va * vb
            for key, w in alg.bracket_mono(ka, kb).terms.items():
                add_into(out, key, c * w)
    return SuperPoly(alg, out)


def degree_operator(f: SuperPoly) -> Dict[int, SuperPoly]:
    """Split ``f`` by (number of x factors) - (number of y factors)."""
    alg = f.algebra
    parts: Dict[int, Dict] = {}
    for key, v in f.terms.items():
        deg = 0
        for i, e in key:
            kind = alg.generators[i].kind
            if kind == "x":
                deg += e
            elif kind == "y":
                deg -= e
            else:
                raise ValueError(f"degree operator needs Fock generators, got {kind!r}")
        parts.setdefault(deg, {})[key] = v
    return {k: SuperPoly(alg, t) for k, t in sorted(parts.items())}


def substitute(f: SuperPoly, images: Sequence, target) -> object:
    """Algebra map sending generator i of ``f``'s algebra to ``images[i]`` in a
    supercommutative ``target``; the ordering of factors in each key is used."""
    out = target.zero()
    for key, v in f.terms.items():
        term = target.scalar(v)
        for i, e in key:
            for _ in range(e):
                term = term * images[i]
        out = out + term
    return out


# packed variant for heavy arithmetic

PACK_FIELD = 16
PACK_MASK = (1 << PACK_FIELD) - 1


class PackedSuperPoly(SparseElement):
    __slots__ = ()


class PackedSuperPolyAlgebra(SparseAlgebra):
    """The supercommutative algebra of ``base`` with monomials packed into
    ints (16 bits of exponent per generator), so that a product of monomials
    is an integer sum plus a cached sign.  Brackets are not available; use
    :meth:`pack` and :meth:`unpack` to move between the two forms."""

    element_class = PackedSuperPoly

    def __init__(self, base: SuperPolyAlgebra):
        self.base = base
        self.parities = base.parities
        self.odd_bits = sum(1 << (PACK_FIELD * i) for i, p in enumerate(base.parities) if p)
        self._sign_cache: Dict = {}

    def __eq__(self, other):
        return isinstance(other, PackedSuperPolyAlgebra) and self.base == other.base

    def __hash__(self):
        return hash(("packed", self.base))

    def __repr__(self):
        return f"Packed({self.base!r})"

    @staticmethod
    def pack_key(key: Monomial) -> int:
        out = 0
        for i, e in key:
            if not 0 <= e <= PACK_MASK:
                raise OverflowError("exponent does not fit a packed monomial")
            out += e << (PACK_FIELD * i)
        return out

    @staticmethod
    def unpack_key(packed: int) -> Monomial:
        out = []
        i = 0
        while packed:
            e = packed & PACK_MASK
            if e:
                out.append((i, e))
            packed >>= PACK_FIELD
            i += 1
        return tuple(out)

    def pack(self, f: SuperPoly) -> PackedSuperPoly:
        if f.algebra != self.base:
            raise AlgebraMismatch("polynomial is not over the packed algebra's generators")
        return PackedSuperPoly(self, {self.pack_key(k): v for k, v in f.terms.items()})

    def unpack(self, f: PackedSuperPoly) -> SuperPoly:
        return SuperPoly(self.base, {self.unpack_key(k): v for k, v in f.terms.items()})

    # SparseAlgebra protocol
    def unit_key(self):
        return 0

    def monomial_parity(self, key: int) -> int:
        return bin(key & self.odd_bits).count("1") & 1

    def monomial_degree(self, key: int) -> int:
        return sum(e for _, e in self.unpack_key(key))

    def sort_key(self, key: int):
        return self.base.sort_key(self.unpack_key(key))

    def format_monomial(self, key: int) -> str:
        return self.base.format_monomial(self.unpack_key(key))

    def _sign(self, a: int, b: int) -> int:
        """(-1)^(number of odd pairs with the left generator larger)."""
        hit = self._sign_cache.get((a, b))
        if hit is None:
            left = [i for i, _ in self.unpack_key(a)]
            count = sum(1 for j, _ in self.unpack_key(b) for i in left if i > j)
            hit = self._sign_cache[(a, b)] = -1 if count & 1 else 1
        return hit

    def monomial_product(self, ka: int, kb: int):
        ob = self.odd_bits
        oa, obb = ka & ob, kb & ob
        if oa & obb:
            return ()
        return ((ka + kb, self._sign(oa, obb) if oa and obb else 1),)

    def multiply(self, a: PackedSuperPoly, b: PackedSuperPoly) -> PackedSuperPoly:
        ob = self.odd_bits
        sign = self._sign
        out: Dict = {}
        get = out.get
        for ka, va in a.terms.items():
            oa = ka & ob
            for kb, vb in b.terms.items():
                c = va * vb
                if oa:
                    obb = kb & ob
                    if obb:
                        if oa & obb:
                            continue
                        if sign(oa, obb) < 0:
                            c = -c
                key = ka + kb
                s = get(key)
                if s is None:
                    out[key] = c
                else:
                    s += c
                    if s:
                        out[key] = s
                    else:
                        del out[key]
        return PackedSuperPoly(self, out)
