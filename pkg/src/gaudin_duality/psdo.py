"""Truncated pseudo-differential operators in two symbols z and D = d/dz.

Elements are stored in the ordering "z-powers left, D-powers right" as a map
``(i, j) -> coefficient`` for the monomial ``c z^i D^j``.  A formal series in
this ring is supported in a quadrant ``i <= z_max, j <= d_max``; a truncated
element only knows its coefficients on ``i >= z_min and j >= d_min``.  The
:class:`Window` carries those four numbers and every operation propagates them
so that a stored coefficient is always exactly the coefficient of the
untruncated series.

A ring may be flagged ``commutative`` (the symbols commute), which is how the
classical two-variable Laurent rings in (z, w) are modelled: the second symbol
plays the role of D.
"""

from __future__ import annotations

import math
from typing import Callable, Dict, NamedTuple, Optional, Tuple

from .scalars import Q, binom, falling_contraction, inv, ratio, to_str

NEG_INF = -math.inf


class PrecisionExhausted(ArithmeticError):
    """A requested coefficient lies outside every window that can be computed."""


class NotInvertible(ArithmeticError):
    pass


class Window(NamedTuple):
    z_min: float
    z_max: float
    d_min: float
    d_max: float

    def contains(self, i, j) -> bool:
        return self.z_min <= i <= self.z_max and self.d_min <= j <= self.d_max

    def known(self, i, j) -> bool:
        return i >= self.z_min and j >= self.d_min

    def covers(self, other: "Window") -> bool:
        """True if every position of ``other`` is known here."""
        return self.z_min <= other.z_min and self.d_min <= other.d_min

    def as_list(self):
        return [None if math.isinf(v) else int(v) for v in self]


def _max(a, b):
    return a if a >= b else b


class RationalRing:
    """The field Q viewed as a coefficient ring (elements are exact rationals)."""

    def __eq__(self, other):
        return isinstance(other, RationalRing)

    def __hash__(self):
        return hash("Q")

    def zero(self):
        return 0

    def one(self):
        return 1

    def scalar(self, c):
        return Q(c)

    def is_zero(self, x):
        return x == 0

    def scalar_value(self, x):
        return Q(x)

    def parity_parts(self, x):
        return {0: x} if x else {}


QQ = RationalRing()


class PsdoRing:
    """Ring of truncated pseudo-differential operators over ``coeffs``.

    ``z_floor``/``d_floor`` are the lowest exponents ever computed; anything
    below is discarded and the windows record that.
    """

    def __init__(self, coeffs=QQ, z_floor: int = -8, d_floor: int = -8, commutative: bool = False):
        self.coeffs = coeffs
        self.z_floor = z_floor
        self.d_floor = d_floor
        self.commutative = commutative

    def __eq__(self, other):
        return (isinstance(other, PsdoRing) and self.coeffs == other.coeffs
                and self.commutative == other.commutative)

    def __hash__(self):
        return hash((self.coeffs, self.commutative))

    def __repr__(self):
        kind = "commutative" if self.commutative else "zpz"
        return f"PsdoRing({self.coeffs!r}, {kind}, floors=({self.z_floor},{self.d_floor}))"

    def with_floors(self, z_floor: int, d_floor: int) -> "PsdoRing":
        return PsdoRing(self.coeffs, z_floor, d_floor, self.commutative)

    # constructors
    def element(self, terms: Dict, window: Optional[Window] = None) -> "TruncatedPsdo":
        """Exact (polynomial) element unless a window is given."""
        cz = self.coeffs
        clean = {}
        for (i, j), c in terms.items():
            c = cz.scalar(c) if not hasattr(c, "terms") and cz is not QQ else c
            if not cz.is_zero(c):
                clean[(int(i), int(j))] = c
        if window is None:
            zmax = max((i for i, _ in clean), default=NEG_INF)
            dmax = max((j for _, j in clean), default=NEG_INF)
            window = Window(NEG_INF, zmax, NEG_INF, dmax)
        return TruncatedPsdo(self, clean, window)._clip()

    def zero(self) -> "TruncatedPsdo":
        return TruncatedPsdo(self, {}, Window(NEG_INF, NEG_INF, NEG_INF, NEG_INF))

    def one(self) -> "TruncatedPsdo":
        return self.element({(0, 0): self.coeffs.one()})

    def const(self, c) -> "TruncatedPsdo":
        return self.element({(0, 0): c})

    def monomial(self, i: int, j: int, c=1) -> "TruncatedPsdo":
        return self.element({(i, j): c})

    def z(self) -> "TruncatedPsdo":
        return self.monomial(1, 0, self.coeffs.one())

    def d(self) -> "TruncatedPsdo":
        return self.monomial(0, 1, self.coeffs.one())

    def pole_expand(self, c, k: int, symbol: str = "z") -> "TruncatedPsdo":
        """1/(s - c)^k expanded in s^{-1}, where s is z or D (c rational)."""
        if k < 1:
            raise ValueError("pole order must be >= 1")
        c = Q(c)
        floor = self.z_floor if symbol == "z" else self.d_floor
        terms = {}
        for j in range(0, -k - floor + 1):
            coef = binom(j + k - 1, k - 1) * c ** j
            if coef:
                e = -j - k
                key = (e, 0) if symbol == "z" else (0, e)
                terms[key] = self.coeffs.scalar(coef) if self.coeffs is not QQ else Q(coef)
        if symbol == "z":
            w = Window(floor, -k, NEG_INF, 0)
        else:
            w = Window(NEG_INF, 0, floor, -k)
        return TruncatedPsdo(self, terms, w)._clip()

    def linear_power(self, c, e: int, symbol: str = "z") -> "TruncatedPsdo":
        """(s - c)^e for any integer e (negative powers expanded in s^{-1})."""
        if e >= 0:
            s = self.z() if symbol == "z" else self.d()
            base = s - self.const(self.coeffs.scalar(c) if self.coeffs is not QQ else Q(c))
            out = self.one()
            for _ in range(e):
                out = out * base
            return out
        return self.pole_expand(c, -e, symbol)

    def rewrite_dz(self, i: int, j: int, c) -> "TruncatedPsdo":
        """The operator c D^i z^j written in canonical order."""
        return psdo_mul(self.monomial(0, i, c), self.monomial(j, 0, self.coeffs.one()))


class TruncatedPsdo:
    __slots__ = ("ring", "terms", "window")

    def __init__(self, ring: PsdoRing, terms: Dict[Tuple[int, int], object], window: Window):
        self.ring = ring
        self.terms = terms
        self.window = window

    # internal
    def _clip(self) -> "TruncatedPsdo":
        r = self.ring
        w = self.window
        zmin = _max(w.z_min, r.z_floor) if self._needs_floor("z") else w.z_min
        dmin = _max(w.d_min, r.d_floor) if self._needs_floor("d") else w.d_min
        w = Window(zmin, w.z_max, dmin, w.d_max)
        terms = {k: v for k, v in self.terms.items() if k[0] >= zmin and k[1] >= dmin}
        self.terms, self.window = terms, w
        return self

    def _needs_floor(self, sym: str) -> bool:
        # a coordinate with an infinite lower bound is exact; it only needs a
        # floor if stored terms would otherwise run below it
        w = self.window
        if sym == "z":
            return not math.isinf(w.z_min) or any(i < self.ring.z_floor for i, _ in self.terms)
        return not math.isinf(w.d_min) or any(j < self.ring.d_floor for _, j in self.terms)

    def _check(self, other: "TruncatedPsdo"):
        if other.ring.coeffs != self.ring.coeffs or other.ring.commutative != self.ring.commutative:
            raise ValueError("pseudo-differential operators over different rings")

    def _coerce(self, other) -> "TruncatedPsdo":
        if isinstance(other, TruncatedPsdo):
            self._check(other)
            return other
        return self.ring.const(other)

    # arithmetic
    def __add__(self, other):
        other = self._coerce(other)
        cz = self.ring.coeffs
        w = Window(_max(self.window.z_min, other.window.z_min), _max(self.window.z_max, other.window.z_max),
                   _max(self.window.d_min, other.window.d_min), _max(self.window.d_max, other.window.d_max))
        out = {k: v for k, v in self.terms.items() if w.known(*k)}
        for k, v in other.terms.items():
            if not w.known(*k):
                continue
            if k in out:
                s = out[k] + v
                if cz.is_zero(s):
                    del out[k]
                else:
                    out[k] = s
            else:
                out[k] = v
        return TruncatedPsdo(self.ring, out, w)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedPsdo(self.ring, {k: -v for k, v in self.terms.items()}, self.window)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "TruncatedPsdo":
        """Multiply every coefficient by a rational (or central) factor c on the left."""
        cz = self.ring.coeffs
        out = {}
        for k, v in self.terms.items():
            p = c * v
            if not cz.is_zero(p):
                out[k] = p
        return TruncatedPsdo(self.ring, out, self.window if out or c else self.ring.zero().window)

    def __mul__(self, other):
        if not isinstance(other, TruncatedPsdo):
            return self.scale(Q(other)) if not hasattr(other, "terms") else self * self.ring.const(other)
        self._check(other)
        return psdo_mul(self, other)

    def __rmul__(self, other):
        if hasattr(other, "terms"):
            return self.ring.const(other) * self
        return self.scale(Q(other))

    def __eq__(self, other):
        if not isinstance(other, TruncatedPsdo):
            return NotImplemented
        return self.window == other.window and self.terms == other.terms

    def __hash__(self):
        return hash((self.window, frozenset(self.terms)))

    def coefficient(self, i: int, j: int):
        if not self.window.known(i, j):
            raise PrecisionExhausted(f"coefficient ({i},{j}) outside window {self.window.as_list()}")
        return self.terms.get((i, j), self.ring.coeffs.zero())

    def is_zero(self) -> bool:
        return not self.terms

    def map_coefficients(self, f: Callable, ring: PsdoRing) -> "TruncatedPsdo":
        """Apply a coefficient homomorphism termwise."""
        out = {}
        for k, v in self.terms.items():
            c = f(v)
            if not ring.coeffs.is_zero(c):
                out[k] = c
        return TruncatedPsdo(ring, out, self.window)

    def restrict(self, z_min, d_min) -> "TruncatedPsdo":
        """Forget coefficients below the given lower bounds."""
        w = Window(_max(self.window.z_min, z_min), self.window.z_max,
                   _max(self.window.d_min, d_min), self.window.d_max)
        return TruncatedPsdo(self.ring, {k: v for k, v in self.terms.items() if w.known(*k)}, w)

    def tighten(self) -> "TruncatedPsdo":
        """Lower the support bounds to what the stored terms prove."""
        w = self.window
        zmax, dmax = w.z_max, w.d_max
        if math.isinf(w.d_min):
            zmax = max(max((i for i, _ in self.terms), default=NEG_INF), w.z_min - 1)
        if math.isinf(w.z_min):
            dmax = max(max((j for _, j in self.terms), default=NEG_INF), w.d_min - 1)
        zmax = min(zmax, w.z_max)
        dmax = min(dmax, w.d_max)
        return TruncatedPsdo(self.ring, self.terms, Window(w.z_min, zmax, w.d_min, dmax))

    def sorted_items(self):
        return sorted(self.terms.items(), key=lambda kv: (-kv[0][1], -kv[0][0]))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (i, j), c in self.sorted_items():
            mono = []
            if i:
                mono.append("z" if i == 1 else f"z^{i}")
            if j:
                mono.append("D" if j == 1 else f"D^{j}")
            cs = to_str(c) if self.ring.coeffs is QQ else f"({c})"
            parts.append("*".join([cs] + mono) if mono else cs)
        return " + ".join(parts)

    __repr__ = __str__


def psdo_mul(a: TruncatedPsdo, b: TruncatedPsdo) -> TruncatedPsdo:
    """Product, rewritten with D^j z^k = sum_t C(j,t) C(k,t) t! z^{k-t} D^{j-t}.

    The known region of the result is every (I, J) whose contributions all
    come from known coefficients of the operands; the ring floors cap how far
    down infinite contraction series are followed, and a coordinate that was
    exact stays exact only if no nonzero contribution had to be dropped.
    """
    ring = a.ring
    wa, wb = a.window, b.window
    if not a.terms and wa.z_max == NEG_INF:
        return ring.zero()
    if not b.terms and wb.z_max == NEG_INF:
        return ring.zero()
    zmax = wa.z_max + wb.z_max
    dmax = wa.d_max + wb.d_max
    zmin_f = _max(wa.z_min + wb.z_max, wb.z_min + wa.z_max)
    dmin_f = _max(wa.d_min + wb.d_max, wb.d_min + wa.d_max)
    zlo = _max(zmin_f, ring.z_floor)
    dlo = _max(dmin_f, ring.d_floor)
    z_floor_bites = zlo > zmin_f
    d_floor_bites = dlo > dmin_f
    drop_z = drop_d = False
    cz = ring.coeffs
    comm = ring.commutative
    out: Dict[Tuple[int, int], object] = {}
    for (i, j), ca in a.terms.items():
        for (k, l), cb in b.terms.items():
            I0, J0 = i + k, j + l
            if I0 < zlo or J0 < dlo:
                if I0 >= zmin_f and J0 >= dmin_f:
                    drop_z |= I0 < zlo and z_floor_bites
                    drop_d |= J0 < dlo and d_floor_bites
                continue
            c = ca * cb
            if cz.is_zero(c):
                continue
            if comm:
                _acc(out, (I0, J0), c, cz)
                continue
            tcut = min(I0 - zlo, J0 - dlo)
            tend = tcut
            if 0 <= j < tend:
                tend = j
            if 0 <= k < tend:
                tend = k
            _acc(out, (I0, J0), c, cz)
            for t in range(1, int(tend) + 1):
                _acc(out, (I0 - t, J0 - t), falling_contraction(j, k, t) * c, cz)
            if tend == tcut and falling_contraction(j, k, int(tcut) + 1):
                I1, J1 = I0 - tcut - 1, J0 - tcut - 1
                if I1 >= zmin_f and J1 >= dmin_f:
                    drop_z |= I1 < zlo and z_floor_bites
                    drop_d |= J1 < dlo and d_floor_bites
    w = Window(zlo if drop_z else zmin_f, zmax, dlo if drop_d else dmin_f, dmax)
    res = {key: v for key, v in out.items() if w.known(*key)}
    return TruncatedPsdo(ring, res, w)


def _acc(out, key, c, cz):
    if key in out:
        s = out[key] + c
        if cz.is_zero(s):
            del out[key]
        else:
            out[key] = s
    else:
        out[key] = c


def psdo_invert(a: TruncatedPsdo) -> TruncatedPsdo:
    """Inverse by the corner rule: a = L (1 + N) with L the top monomial."""
    ring = a.ring
    cz = ring.coeffs
    a = a.tighten()
    w = a.window
    if math.isinf(w.z_max) or math.isinf(w.d_max):
        raise NotInvertible("zero operator is not invertible")
    i0, j0 = int(w.z_max), int(w.d_max)
    if not w.known(i0, j0):
        raise PrecisionExhausted("leading coefficient lies outside the window")
    lead = a.terms.get((i0, j0))
    if lead is None:
        raise NotInvertible(f"no leading monomial at z^{i0} D^{j0}")
    c = cz.scalar_value(lead) if cz is not QQ else lead
    if c is None or c == 0:
        raise NotInvertible("leading coefficient is not an invertible scalar")
    ci = inv(c)
    ci_el = cz.scalar(ci) if cz is not QQ else ci
    # L^{-1} = c^{-1} D^{-j0} z^{-i0}
    Linv = ring.rewrite_dz(-j0, -i0, ci_el)
    rest = a - ring.monomial(i0, j0, lead)
    N = Linv * rest
    result = Linv
    term = Linv
    neg_N = -N
    for _ in range(10_000):
        term = neg_N * term
        if not term.terms:
            # window of every further power is contained in this one
            result = result + TruncatedPsdo(ring, {}, term.window)
            break
        result = result + term
    else:  # pragma: no cover
        raise PrecisionExhausted("inverse series did not terminate")
    return result


def omega(a: TruncatedPsdo) -> TruncatedPsdo:
    """Image under z -> D, D -> -z, written back in canonical order.

    z^i D^j goes to (-1)^j D^i z^j; the known region of ``a`` in (z, D)
    becomes the known region of the image in (D, z).
    """
    ring = a.ring
    w = a.window
    out = TruncatedPsdo(ring, {}, Window(w.d_min, w.d_max, w.z_min, w.z_max))
    for (i, j), c in a.terms.items():
        out = out + ring.rewrite_dz(i, j, -c if j & 1 else c)
    return out


def recenter(a: TruncatedPsdo, c, symbol: str = "z") -> TruncatedPsdo:
    """Substitute s -> s - c for s = z or D: a series written in u = s - c
    becomes the same operator written in s.  Both substitutions are ring
    automorphisms, and in the z-left/D-right normal form they act on one
    exponent only.  (s - c)^i expands exactly; for i < 0 the expansion is in
    s^{-1}, so an s^k coefficient only uses u^i with i >= k and the known
    region carries over, clipped at the ring floor."""
    ring = a.ring
    c = Q(c)
    if not c:
        return a
    if symbol not in ("z", "d"):
        raise ValueError("symbol must be 'z' or 'd'")
    pos = 0 if symbol == "z" else 1
    w = a.window
    lo = (w.z_min, w.d_min)[pos]
    floor = (ring.z_floor, ring.d_floor)[pos]
    cz = ring.coeffs
    exact = math.isinf(lo) and all(k[pos] >= 0 for k in a.terms)
    lo = lo if exact else _max(lo, floor)
    out: Dict = {}
    for key, v in a.terms.items():
        i = key[pos]
        coeff = 1
        t = 0
        while i - t >= lo and (i < 0 or t <= i):
            if coeff:
                new = (i - t, key[1]) if pos == 0 else (key[0], i - t)
                _acc(out, new, v if coeff == 1 else coeff * v, cz)
            coeff = ratio(coeff * (i - t) * (-c), t + 1)
            t += 1
    if pos == 0:
        win = Window(lo, w.z_max, w.d_min, w.d_max)
    else:
        win = Window(w.z_min, w.z_max, lo, w.d_max)
    return TruncatedPsdo(ring, out, win)


def compare(lhs: TruncatedPsdo, rhs: TruncatedPsdo, target: Optional[Window] = None):
    """Exact coefficient comparison on the jointly known region.

    Returns ``(window, mismatches)`` where ``mismatches`` lists the exponent
    pairs whose coefficients differ.
    """
    wl, wr = lhs.window, rhs.window
    z_min = _max(wl.z_min, wr.z_min)
    d_min = _max(wl.d_min, wr.d_min)
    if target is not None:
        z_min = _max(z_min, target.z_min)
        d_min = _max(d_min, target.d_min)
    win = Window(z_min, max(wl.z_max, wr.z_max), d_min, max(wl.d_max, wr.d_max))
    keys = {k for k in lhs.terms if win.known(*k)} | {k for k in rhs.terms if win.known(*k)}
    if target is not None:
        keys = {k for k in keys if target.contains(*k)}
    cz = lhs.ring.coeffs
    bad = []
    for k in sorted(keys, key=lambda t: (-t[1], -t[0])):
        a = lhs.terms.get(k, cz.zero())
        b = rhs.terms.get(k, cz.zero())
        if a != b:
            bad.append(k)
    return win, bad
