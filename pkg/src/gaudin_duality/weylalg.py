"""Weyl superalgebra of differential operators on the Fock space.

Variables are x^a_i (i = 1..m+n, even iff i <= m) and y^a_r (r = 1..p+q, even
iff r <= p) for a = 1..d.  An operator monomial is stored in normal order as
``(X, D)``: multiplication factors first, derivatives second, each an exponent
vector over the variable order of the Fock algebra packed into an int.
"""

from __future__ import annotations

import itertools
from typing import Dict, Tuple

from ._sparse import AlgebraMismatch, SparseAlgebra, SparseElement, add_into, supercommutator
from .scalars import falling_contraction
from .superpoly import Generator, SuperPoly, SuperPolyAlgebra


class WeylProfile:
    """Sizes (d, p, q, m, n) and the induced variable parities."""

    def __init__(self, d: int, p: int = 0, q: int = 0, m: int = 0, n: int = 0):
        for v in (d, p, q, m, n):
            if not isinstance(v, int) or v < 0:
                raise ValueError("profile sizes must be nonnegative integers")
        if d < 1:
            raise ValueError("d must be at least 1")
        self.d, self.p, self.q, self.m, self.n = d, p, q, m, n
        gens = []
        for a in range(1, d + 1):
            for i in range(1, m + n + 1):
                gens.append(Generator("x", a, i, 0 if i <= m else 1, f"x{a}_{i}"))
            for r in range(1, p + q + 1):
                gens.append(Generator("y", a, r, 0 if r <= p else 1, f"y{a}_{r}"))
        self.fock = SuperPolyAlgebra(gens)
        momenta = [Generator("p" + g.kind, g.a, g.index, g.parity, "p_" + g.name) for g in gens]
        brackets = {(("p" + g.kind, g.a, g.index), g.label): 1 for g in gens}
        self.classical = SuperPolyAlgebra(list(gens) + momenta, brackets)
        self.variables = self.fock.generators
        self.parities = self.fock.parities
        self.weyl = WeylAlgebra(self)

    @property
    def sizes(self):
        return (self.d, self.p, self.q, self.m, self.n)

    def __eq__(self, other):
        return isinstance(other, WeylProfile) and self.sizes == other.sizes

    def __hash__(self):
        return hash(self.sizes)

    def __repr__(self):
        return "WeylProfile(d={}, p={}, q={}, m={}, n={})".format(*self.sizes)

    def var_index(self, kind: str, a: int, i: int) -> int:
        return self.fock.index_of[(kind, a, i)]

    # generators as operators
    def x(self, a: int, i: int) -> "WeylElement":
        return self.weyl.mult_op(self.var_index("x", a, i))

    def y(self, a: int, r: int) -> "WeylElement":
        return self.weyl.mult_op(self.var_index("y", a, r))

    def dx(self, a: int, i: int) -> "WeylElement":
        return self.weyl.deriv_op(self.var_index("x", a, i))

    def dy(self, a: int, r: int) -> "WeylElement":
        return self.weyl.deriv_op(self.var_index("y", a, r))


class WeylElement(SparseElement):
    __slots__ = ()


FIELD = 16
FIELD_MASK = (1 << FIELD) - 1


class WeylAlgebra(SparseAlgebra):
    """Normally ordered monomials ``(X, D)``; each block packs the exponent of
    variable v into bits [16 v, 16 v + 16) of an int, so that merging blocks
    of even variables is integer addition."""

    element_class = WeylElement

    def __init__(self, profile: WeylProfile):
        self.profile = profile
        self.parities = profile.parities
        self.odd_bits = sum(1 << (FIELD * v) for v, p in enumerate(self.parities) if p)
        self._rx_cache: Dict = {}
        self._sign_cache: Dict = {}
        self._mid_cache: Dict = {}
        self._unpack_cache: Dict = {}

    def __eq__(self, other):
        return isinstance(other, WeylAlgebra) and self.profile == other.profile

    def __hash__(self):
        return hash(("weyl", self.profile.sizes))

    def __repr__(self):
        return f"WeylAlgebra({self.profile!r})"

    # block packing
    @staticmethod
    def pack(pairs) -> int:
        out = 0
        for v, e in pairs:
            if not 0 <= e <= FIELD_MASK:
                raise OverflowError("exponent does not fit a packed block")
            out += e << (FIELD * v)
        return out

    def unpack(self, block: int) -> Tuple:
        """Sorted ``(variable, exponent)`` pairs of a packed block."""
        hit = self._unpack_cache.get(block)
        if hit is None:
            out = []
            v, b = 0, block
            while b:
                e = b & FIELD_MASK
                if e:
                    out.append((v, e))
                b >>= FIELD
                v += 1
            hit = self._unpack_cache[block] = tuple(out)
        return hit

    def make_key(self, X, D):
        return (self.pack(X), self.pack(D))

    def split_key(self, key):
        return self.unpack(key[0]), self.unpack(key[1])

    def mult_op(self, v: int) -> WeylElement:
        return WeylElement(self, {(1 << (FIELD * v), 0): 1})

    def deriv_op(self, v: int) -> WeylElement:
        return WeylElement(self, {(0, 1 << (FIELD * v)): 1})

    # SparseAlgebra protocol
    def unit_key(self):
        return (0, 0)

    def monomial_parity(self, key) -> int:
        ob = self.odd_bits
        return (bin(key[0] & ob).count("1") + bin(key[1] & ob).count("1")) & 1

    def monomial_degree(self, key) -> int:
        X, D = self.split_key(key)
        return sum(e for _, e in X) + sum(e for _, e in D)

    def sort_key(self, key):
        X, D = self.split_key(key)
        return (self.monomial_degree(key), X, D)

    def format_monomial(self, key) -> str:
        X, D = self.split_key(key)
        names = self.profile.variables
        out = []
        for i, e in X:
            s = names[i].display()
            out.append(s if e == 1 else f"{s}^{e}")
        for i, e in D:
            s = "d" + names[i].display()
            out.append(s if e == 1 else f"{s}^{e}")
        return "*".join(out)

    def _odd_sign(self, a: int, b: int) -> int:
        """Sign of sorting odd letters a (left) and b (right) into one block:
        (-1) to the number of pairs with the left letter larger."""
        if not a or not b:
            return 1
        hit = self._sign_cache.get((a, b))
        if hit is None:
            left = [v for v, _ in self.unpack(a)]
            count = sum(1 for v, _ in self.unpack(b) for u in left if u > v)
            hit = self._sign_cache[(a, b)] = -1 if count & 1 else 1
        return hit

    def _sorted_insert(self, block: Tuple, u: int):
        """Append factor u at the right of a sorted block and sort it into place.
        Returns (sign, block) or None for an odd square."""
        par = self.parities
        pu = par[u]
        sign = 1
        pos = len(block)
        while pos > 0 and block[pos - 1][0] > u:
            v, e = block[pos - 1]
            if pu and par[v] and e & 1:
                sign = -sign
            pos -= 1
        if pos > 0 and block[pos - 1][0] == u:
            if pu:
                return None
            out = block[:pos - 1] + ((u, block[pos - 1][1] + 1),) + block[pos:]
        else:
            out = block[:pos] + ((u, 1),) + block[pos:]
        return sign, out

    def _times_mult(self, key, u: int):
        """Normal form of (X D) * u for a multiplication generator u, on
        unpacked blocks."""
        hit = self._rx_cache.get((key, u))
        if hit is not None:
            return hit
        par = self.parities
        pu = par[u]
        X, D = key
        out: Dict = {}
        # walk u leftwards through D from the right
        sign = 1
        for pos in range(len(D) - 1, -1, -1):
            v, b = D[pos]
            if v == u:
                # contraction term: d_u^b u -> b d_u^{b-1} (boson) or 1 (fermion)
                rest = D[:pos] + (((u, b - 1),) if b > 1 else ()) + D[pos + 1:]
                c = b if not pu else 1
                add_into(out, (X, rest), sign * c)
                if pu:
                    sign = -sign
                continue
            if pu and par[v] and b & 1:
                sign = -sign
        ins = self._sorted_insert(X, u)
        if ins is not None:
            s2, X2 = ins
            add_into(out, (X2, D), sign * s2)
        res = tuple(out.items())
        self._rx_cache[(key, u)] = res
        return res

    def _times_deriv(self, key, u: int):
        X, D = key
        ins = self._sorted_insert(D, u)
        if ins is None:
            return ()
        s, D2 = ins
        return (((X, D2), s),)

    def monomial_product_stepwise(self, ka, kb):
        """Product of two monomials by moving one generator at a time; slow,
        kept as an independent reference for the closed-form product."""
        cur: Dict = {self.split_key(ka): 1}
        X2, D2 = self.split_key(kb)
        for v, e in X2:
            for _ in range(e):
                nxt: Dict = {}
                for k, c in cur.items():
                    for k2, w in self._times_mult(k, v):
                        add_into(nxt, k2, c * w)
                cur = nxt
        for v, e in D2:
            for _ in range(e):
                nxt = {}
                for k, c in cur.items():
                    for k2, w in self._times_deriv(k, v):
                        add_into(nxt, k2, c * w)
                cur = nxt
        return tuple((self.make_key(*k), c) for k, c in cur.items())

    def _middle(self, D1: int, X2: int):
        """Normal form of d^D1 * x^X2 as a tuple of ``(X, D, coefficient)``.

        Each variable present on both sides contracts independently: a boson
        with derivative power b and variable power g contributes
        C(b,k) C(g,k) k! for k contractions; a fermion contracts at most once.
        The sign is that of the permutation bringing the odd letters of the word
        into the order (contracted pairs, remaining variables, remaining derivatives).
        """
        key = (D1, X2)
        hit = self._mid_cache.get(key)
        if hit is not None:
            return hit
        par = self.parities
        Dt, Xt = self.unpack(D1), self.unpack(X2)
        dpow = dict(Dt)
        xpow = dict(Xt)
        common = [v for v in dpow if v in xpow]
        choices = []
        for v in common:
            b, g = dpow[v], xpow[v]
            if par[v]:
                choices.append(((0, 1), (1, 1)))
            else:
                choices.append(tuple((k, falling_contraction(b, g, k)) for k in range(min(b, g) + 1)))
        odd_d = [v for v, _ in Dt if par[v]]
        odd_x = [v for v, _ in Xt if par[v]]
        out = []
        for combo in itertools.product(*choices):
            coeff = 1
            contracted = []
            Xp, Dp = X2, D1
            for v, (k, w) in zip(common, combo):
                if k:
                    coeff *= w
                    Xp -= k << (FIELD * v)
                    Dp -= k << (FIELD * v)
                    if par[v]:
                        contracted.append(v)
            if odd_d and odd_x:
                cset = set(contracted)
                order = {}
                pos = 0
                for v in sorted(contracted):
                    order[("d", v)] = pos
                    order[("x", v)] = pos + 1
                    pos += 2
                for v in odd_x:
                    if v not in cset:
                        order[("x", v)] = pos
                        pos += 1
                for v in odd_d:
                    if v not in cset:
                        order[("d", v)] = pos
                        pos += 1
                seq = [order[("d", v)] for v in odd_d] + [order[("x", v)] for v in odd_x]
                inversions = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
                if inversions & 1:
                    coeff = -coeff
            out.append((Xp, Dp, coeff))
        res = tuple(out)
        self._mid_cache[key] = res
        return res

    def monomial_product(self, ka, kb):
        X1, D1 = ka
        X2, D2 = kb
        ob = self.odd_bits
        sgn = self._odd_sign
        out: Dict = {}
        for Xp, Dp, w in self._middle(D1, X2):
            a1, a2 = X1 & ob, Xp & ob
            b1, b2 = Dp & ob, D2 & ob
            if a1 & a2 or b1 & b2:
                continue
            key = (X1 + Xp, Dp + D2)
            out[key] = out.get(key, 0) + sgn(a1, a2) * sgn(b1, b2) * w
        return tuple((k, v) for k, v in out.items() if v)

    def multiply(self, a: "WeylElement", b: "WeylElement") -> "WeylElement":
        ob = self.odd_bits
        left: Dict = {}
        for (X1, D1), ca in a.terms.items():
            left.setdefault(D1, []).append((X1, X1 & ob, ca))
        right: Dict = {}
        for (X2, D2), cb in b.terms.items():
            right.setdefault(X2, []).append((D2, D2 & ob, cb))
        out: Dict = {}
        get = out.get
        sgn = self._odd_sign
        middle = self._middle
        for D1, alist in left.items():
            for X2, blist in right.items():
                for Xp, Dp, w in middle(D1, X2):
                    po = Dp & ob
                    if po:
                        rights = [(Dp + D2, sgn(po, o2) * w * cb) for D2, o2, cb in blist if not po & o2]
                    else:
                        rights = [(Dp + D2, w * cb) for D2, _, cb in blist]
                    if not rights:
                        continue
                    xo = Xp & ob
                    for X1, o1, ca in alist:
                        if o1 & xo:
                            continue
                        Xn = X1 + Xp
                        f = sgn(o1, xo) * ca if xo and o1 else ca
                        for Dn, c in rights:
                            key = (Xn, Dn)
                            out[key] = get(key, 0) + f * c
        return WeylElement(self, {k: v for k, v in out.items() if v})


def weyl_mul(a: WeylElement, b: WeylElement) -> WeylElement:
    if a.algebra != b.algebra:
        raise AlgebraMismatch("Weyl elements over different profiles")
    return a * b


def weyl_commutator(a: WeylElement, b: WeylElement) -> WeylElement:
    if a.algebra != b.algebra:
        raise AlgebraMismatch("Weyl elements over different profiles")
    return supercommutator(a, b)


def _left_derivative(fock: SuperPolyAlgebra, u: int, key):
    """d/du of a Fock monomial, acting from the left."""
    par = fock.parities
    odd_before = 0
    for pos, (v, e) in enumerate(key):
        if v == u:
            rest = key[:pos] + (((u, e - 1),) if e > 1 else ()) + key[pos + 1:]
            c = e if not par[u] else 1
            if par[u] and odd_before & 1:
                c = -c
            return rest, c
        if par[v]:
            odd_before += e
    return None


def weyl_act(a: WeylElement, f: SuperPoly) -> SuperPoly:
    """Apply the operator ``a`` to the Fock polynomial ``f``."""
    fock = a.algebra.profile.fock
    if f.algebra != fock:
        raise AlgebraMismatch("polynomial is not over this profile's Fock space")
    out: Dict = {}
    W = a.algebra
    for key, ca in a.terms.items():
        X, D = W.split_key(key)
        cur = dict(f.terms)
        # derivatives: the rightmost factor acts first
        for v, e in reversed(D):
            for _ in range(e):
                nxt: Dict = {}
                for k, c in cur.items():
                    hit = _left_derivative(fock, v, k)
                    if hit is not None:
                        add_into(nxt, hit[0], c * hit[1])
                cur = nxt
        if not cur:
            continue
        xpoly = SuperPoly(fock, {X: 1})
        res = xpoly * SuperPoly(fock, cur)
        for k, c in res.terms.items():
            add_into(out, k, ca * c)
    return SuperPoly(fock, out)


def weyl_gr(a: WeylElement, filtration_degree: int) -> SuperPoly:
    """Symbol of ``a`` in the classical algebra at the given filtration level."""
    prof = a.algebra.profile
    cl = prof.classical
    out = cl.zero()
    for key, c in a.terms.items():
        deg = a.algebra.monomial_degree(key)
        if deg > filtration_degree:
            raise ValueError(f"element has degree {deg} above filtration level {filtration_degree}")
        if deg < filtration_degree:
            continue
        X, D = a.algebra.split_key(key)
        term = cl.scalar(c)
        for v, e in X:
            g = prof.variables[v]
            for _ in range(e):
                term = term * cl.gen(g.kind, g.a, g.index)
        for v, e in D:
            g = prof.variables[v]
            for _ in range(e):
                term = term * cl.gen("p" + g.kind, g.a, g.index)
        out = out + term
    return out
