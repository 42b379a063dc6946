"""Lie superalgebras by structure constants and their enveloping algebras.

Basis elements are referred to by hashable labels; internally they are indexed
by position, and that position order is the PBW order.  A PBW monomial is a
nondecreasing tuple of basis indices in which odd indices occur at most once.
"""

from __future__ import annotations

from typing import Dict, Hashable, List, Optional, Sequence, Tuple

from ._sparse import AlgebraMismatch, SparseAlgebra, SparseElement, add_into, supercommutator
from .scalars import Q, binom, ratio


def gl_parity(p: int, q: int, m: int, n: int, i: int) -> int:
    """Parity of the index i (1-based) for gl_{p+m|q+n}."""
    if 1 <= i <= p or p + q < i <= p + q + m:
        return 0
    return 1


class LieSuperData:
    """A finite-dimensional Lie superalgebra given by structure constants.

    ``brackets`` maps ``(label_a, label_b)`` to ``{label_c: coefficient}``;
    pairs that are absent bracket to zero, and only one of each pair
    ``(a, b)``/``(b, a)`` needs to be given (the other follows by superskew
    symmetry).  Both superskewness and the super Jacobi identity are checked.
    """

    def __init__(self, labels: Sequence[Hashable], parities: Sequence[int], brackets: Dict,
                 validate: bool = True, name: str = "g"):
        if len(labels) != len(parities):
            raise ValueError("labels and parities differ in length")
        if len(set(labels)) != len(labels):
            raise ValueError("basis labels must be unique")
        self.name = name
        self.labels = tuple(labels)
        self.parities = tuple(int(p) & 1 for p in parities)
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        table: Dict[Tuple[int, int], Dict[int, object]] = {}
        for (la, lb), vec in brackets.items():
            i, j = self.index[la], self.index[lb]
            v = {self.index[lc]: Q(c) for lc, c in vec.items() if c}
            for k in v:
                if self.parities[k] != (self.parities[i] ^ self.parities[j]):
                    raise ValueError(f"bracket of {la!r}, {lb!r} is not parity-homogeneous")
            if (i, j) in table and table[(i, j)] != v:
                raise ValueError(f"conflicting brackets for {la!r}, {lb!r}")
            if v:
                table[(i, j)] = v
            sgn = 1 if (self.parities[i] and self.parities[j]) else -1
            mirror = {k: sgn * c for k, c in v.items()}
            if (j, i) in table and table[(j, i)] != mirror:
                raise ValueError(f"bracket table is not superskew at {la!r}, {lb!r}")
            if mirror:
                table[(j, i)] = mirror
        self._table = table
        self._key = (self.labels, self.parities, tuple(sorted((k, tuple(sorted(v.items()))) for k, v in table.items())))
        if validate:
            self.validate()

    @property
    def dim(self) -> int:
        return len(self.labels)

    def __eq__(self, other):
        return isinstance(other, LieSuperData) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"LieSuperData({self.name}, dim={self.dim})"

    def bracket_idx(self, i: int, j: int) -> Dict[int, object]:
        return self._table.get((i, j), {})

    def bracket(self, la, lb) -> Dict[Hashable, object]:
        return {self.labels[k]: c for k, c in self.bracket_idx(self.index[la], self.index[lb]).items()}

    def parity(self, label) -> int:
        return self.parities[self.index[label]]

    def _bracket_vec(self, u: Dict[int, object], v: Dict[int, object]) -> Dict[int, object]:
        out: Dict[int, object] = {}
        for i, a in u.items():
            for j, b in v.items():
                for k, c in self.bracket_idx(i, j).items():
                    add_into(out, k, a * b * c)
        return out

    def validate(self) -> None:
        n = self.dim
        par = self.parities
        for i in range(n):
            for j in range(n):
                lhs = self.bracket_idx(i, j)
                rhs = self.bracket_idx(j, i)
                s = 1 if (par[i] and par[j]) else -1
                if lhs != {k: s * c for k, c in rhs.items()}:
                    raise ValueError(f"superskew symmetry fails at {self.labels[i]!r}, {self.labels[j]!r}")
        # [a,[b,c]] = [[a,b],c] + (-1)^{|a||b|} [b,[a,c]]
        for a in range(n):
            for b in range(n):
                ab = self.bracket_idx(a, b)
                for c in range(n):
                    left = self._bracket_vec({a: 1}, self.bracket_idx(b, c))
                    right = self._bracket_vec(ab, {c: 1})
                    sgn = -1 if (par[a] and par[b]) else 1
                    for k, v in self._bracket_vec({b: 1}, self.bracket_idx(a, c)).items():
                        add_into(right, k, sgn * v)
                    if left != right:
                        raise ValueError("super Jacobi identity fails at "
                                         f"{self.labels[a]!r}, {self.labels[b]!r}, {self.labels[c]!r}")


def make_gl(p: int, q: int, m: int, n: int, symbol: str = "E") -> LieSuperData:
    """gl_{p+m|q+n} with basis E^i_j, labels ``(symbol, i, j)``."""
    N = p + q + m + n
    if min(p, q, m, n) < 0 or N < 1:
        raise ValueError("gl needs nonnegative sizes with p+q+m+n >= 1")
    par = [None] + [gl_parity(p, q, m, n, i) for i in range(1, N + 1)]
    labels, parities = [], []
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            labels.append((symbol, i, j))
            parities.append(par[i] ^ par[j])
    brackets = {}
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            for r in range(1, N + 1):
                for s in range(1, N + 1):
                    vec: Dict = {}
                    if j == r:
                        add_into(vec, (symbol, i, s), 1)
                    if i == s:
                        sgn = -1 if ((par[i] ^ par[j]) & (par[r] ^ par[s])) else 1
                        add_into(vec, (symbol, r, j), -sgn)
                    if vec:
                        brackets[((symbol, i, j), (symbol, r, s))] = vec
    lie = LieSuperData(labels, parities, brackets, name=f"gl({p}+{m}|{q}+{n})")
    lie.gl_sizes = (p, q, m, n)
    lie.gl_symbol = symbol
    return lie


def make_gld(d: int) -> LieSuperData:
    """gl_d, the purely even case, with basis e_ab labelled ``("e", a, b)``."""
    if d < 1:
        raise ValueError("d must be at least 1")
    return make_gl(0, 0, d, 0, symbol="e")


def make_takiff_sum(base: LieSuperData, points: Sequence, orders: Sequence[int],
                    validate: bool = True) -> LieSuperData:
    """Direct sum over sites of the truncated current algebras base ⊗ C[t]/t^γ.

    Labels are ``(site, base_label, k)`` with 0 <= k < γ of that site.
    """
    if len(points) != len(orders) or not points:
        raise ValueError("need matching, nonempty points and orders")
    if any(int(g) < 1 for g in orders):
        raise ValueError("orders must be positive")
    points = [Q(z) for z in points]
    labels, parities = [], []
    for s, g in enumerate(orders):
        for bl in base.labels:
            for k in range(g):
                labels.append((s, bl, k))
                parities.append(base.parity(bl))
    brackets = {}
    for s, g in enumerate(orders):
        for i, la in enumerate(base.labels):
            for j, lb in enumerate(base.labels):
                vec = base.bracket_idx(i, j)
                if not vec:
                    continue
                for k in range(g):
                    for l in range(g - k):
                        brackets[((s, la, k), (s, lb, l))] = {
                            (s, base.labels[c], k + l): v for c, v in vec.items()}
    lie = LieSuperData(labels, parities, brackets, validate=validate,
                       name=f"takiff({base.name}; {list(orders)})")
    lie.base = base
    lie.points = tuple(points)
    lie.orders = tuple(int(g) for g in orders)
    return lie


class PBWElement(SparseElement):
    __slots__ = ()


class PBWAlgebra(SparseAlgebra):
    """Universal enveloping algebra U(g) in the PBW basis."""

    element_class = PBWElement

    def __init__(self, lie: LieSuperData):
        self.lie = lie
        self.parities = lie.parities
        self._wl_cache: Dict = {}
        self._prod_cache: Dict = {}

    def __eq__(self, other):
        return isinstance(other, PBWAlgebra) and self.lie == other.lie

    def __hash__(self):
        return hash(("U", self.lie))

    def __repr__(self):
        return f"U({self.lie.name})"

    def gen(self, label) -> PBWElement:
        return PBWElement(self, {(self.lie.index[label],): 1})

    def from_vector(self, vec: Dict) -> PBWElement:
        """Element of g (as a label->coefficient map) viewed inside U(g)."""
        out = {}
        for lab, c in vec.items():
            c = Q(c)
            if c:
                add_into(out, (self.lie.index[lab],), c)
        return PBWElement(self, out)

    # SparseAlgebra protocol
    def unit_key(self):
        return ()

    def monomial_parity(self, key) -> int:
        par = self.parities
        return sum(par[i] for i in key) & 1

    def monomial_degree(self, key) -> int:
        return len(key)

    def sort_key(self, key):
        return (len(key), key)

    def format_monomial(self, key) -> str:
        return "*".join(_label_str(self.lie.labels[i]) for i in key)

    def word_times_letter(self, word: Tuple[int, ...], g: int) -> Tuple:
        """PBW normal form of word * g, as a tuple of (word, coefficient)."""
        ck = (word, g)
        hit = self._wl_cache.get(ck)
        if hit is not None:
            return hit
        par = self.parities
        out: Dict = {}
        if not word or word[-1] < g or (word[-1] == g and not par[g]):
            out[word + (g,)] = 1
        elif word[-1] == g:
            # odd g: g g = 1/2 [g, g]
            prefix = word[:-1]
            for c, v in self.lie.bracket_idx(g, g).items():
                for w2, v2 in self.word_times_letter(prefix, c):
                    add_into(out, w2, ratio(v, 2) * v2)
        else:
            h = word[-1]
            prefix = word[:-1]
            # u' h g = (-1)^{|h||g|} u' g h + u' [h, g]
            sgn = -1 if (par[h] and par[g]) else 1
            for w2, v2 in self.word_times_letter(prefix, g):
                for w3, v3 in self.word_times_letter(w2, h):
                    add_into(out, w3, sgn * v2 * v3)
            for c, v in self.lie.bracket_idx(h, g).items():
                for w2, v2 in self.word_times_letter(prefix, c):
                    add_into(out, w2, v * v2)
        res = tuple((k, Q(v)) for k, v in out.items())
        self._wl_cache[ck] = res
        return res

    def monomial_product(self, ka, kb):
        hit = self._prod_cache.get((ka, kb))
        if hit is not None:
            return hit
        cur: Dict = {ka: 1}
        for g in kb:
            nxt: Dict = {}
            for w, c in cur.items():
                for w2, v in self.word_times_letter(w, g):
                    add_into(nxt, w2, c * v)
            cur = nxt
        res = tuple(cur.items())
        self._prod_cache[(ka, kb)] = res
        return res


def _label_str(label) -> str:
    if isinstance(label, tuple) and len(label) == 3 and isinstance(label[0], str):
        sym, i, j = label
        return f"{sym}{i}{j}" if sym == "e" else f"{sym}^{i}_{j}"
    if isinstance(label, tuple) and len(label) == 3 and isinstance(label[0], int):
        site, bl, k = label
        return f"{_label_str(bl)}[t{k}@{site + 1}]"
    return str(label)


def pbw_mul(a: PBWElement, b: PBWElement) -> PBWElement:
    if a.algebra != b.algebra:
        raise AlgebraMismatch("PBW elements over different Lie superalgebras")
    return a * b


def pbw_commutator(a: PBWElement, b: PBWElement) -> PBWElement:
    return supercommutator(a, b)


def evaluation_map(U: PBWAlgebra, base_label, r: int, site: Optional[int] = None) -> PBWElement:
    """Image of A ⊗ t^r (r >= 0) under the order-γ evaluation at a site.

    With ``site=None`` the images at all sites are summed, which is the
    evaluation through the iterated coproduct.
    """
    if r < 0:
        raise ValueError("evaluation map is defined on A ⊗ t^r with r >= 0")
    lie = U.lie
    sites = range(len(lie.orders)) if site is None else [site]
    out: Dict = {}
    for s in sites:
        a, g = lie.points[s], lie.orders[s]
        for i in range(min(r, g - 1) + 1):
            c = binom(r, i) * a ** (r - i)
            if c:
                add_into(out, (lie.index[(s, base_label, i)],), Q(c))
    return PBWElement(U, out)


def loop_bracket(base: LieSuperData, x: Tuple, y: Tuple) -> Dict[Tuple, object]:
    """[A ⊗ t^r, B ⊗ t^s] = [A, B] ⊗ t^{r+s} in the current algebra; elements
    are ``(base_label, r)`` pairs."""
    (la, r), (lb, s) = x, y
    return {(lc, r + s): c for lc, c in base.bracket(la, lb).items()}
