"""Gaudin matrices with irregular singularities and their generator families.

Coefficient rings are enveloping algebras of Takiff sums ``g(z, γ)``; the
spectral symbols are z and D = d/dz from :mod:`psdo`.  All matrices are
returned as :class:`~gaudin_duality.ncmatrix.TypedMatrix` over a
:class:`~gaudin_duality.psdo.PsdoRing`.
"""

from __future__ import annotations

from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from .envalg import PBWAlgebra, gl_parity, make_gl, make_gld, make_takiff_sum
from .ncmatrix import PsdoEntries, TypedMatrix
from .psdo import PsdoRing, TruncatedPsdo, omega
from .scalars import Q


class CompositionError(ValueError):
    """Block sizes do not add up as required."""


class SingularityData(NamedTuple):
    points: Tuple
    orders: Tuple[int, ...]

    @classmethod
    def make(cls, points, orders) -> "SingularityData":
        pts = tuple(Q(z) for z in points)
        ords = tuple(int(g) for g in orders)
        if len(pts) != len(ords) or not pts:
            raise ValueError("points and orders must be nonempty and of equal length")
        if any(g < 1 for g in ords):
            raise ValueError("orders must be positive integers")
        if len(set(pts)) != len(pts):
            raise ValueError("singular points must be pairwise distinct")
        return cls(pts, ords)


def jordan_matrix(points: Sequence, orders: Sequence[int]) -> List[List]:
    """Block-diagonal sum of upper Jordan blocks J_{γ_i}(z_i)."""
    n = sum(orders)
    M = [[0] * n for _ in range(n)]
    pos = 0
    for z, g in zip(points, orders):
        for t in range(g):
            M[pos + t][pos + t] = Q(z)
            if t + 1 < g:
                M[pos + t][pos + t + 1] = 1
        pos += g
    return M


def check_gl_composition(p: int, q: int, m: int, n: int, orders: Sequence[int]) -> Tuple[int, int, int, int]:
    """Split the orders into consecutive groups summing to p, q, m, n.

    Returns the group lengths (p', q', m', n').  Raises :class:`CompositionError`
    if no split exists.
    """
    targets = (p, q, m, n)
    counts = []
    pos = 0
    orders = list(orders)
    for tgt in targets:
        acc = 0
        start = pos
        while acc < tgt and pos < len(orders):
            acc += orders[pos]
            pos += 1
        if acc != tgt:
            raise CompositionError(
                f"orders {orders} cannot be grouped into consecutive blocks summing to (p, q, m, n) = {targets}")
        counts.append(pos - start)
    if pos != len(orders):
        raise CompositionError(f"orders {orders} sum to more than p+q+m+n = {sum(targets)}")
    return tuple(counts)


def jordan_mu(w: Sequence, xi: Sequence[int], d: Optional[int] = None) -> Dict:
    """μ(e_ab) = -J_ξ(w)_{ab} on gl_d (labels ("e", a, b))."""
    if d is not None and sum(xi) != d:
        raise CompositionError(f"orders {list(xi)} must sum to d = {d}")
    J = jordan_matrix(w, xi)
    n = len(J)
    return {("e", a + 1, b + 1): -J[a][b] for a in range(n) for b in range(n) if J[a][b]}


def jordan_nu(z: Sequence, gamma: Sequence[int], p: int, q: int, m: int, n: int) -> Dict:
    """ν(E^i_j) = (-1)^{|i|+1} J_γ(z)_{ij} on gl_{p+m|q+n}."""
    check_gl_composition(p, q, m, n, gamma)
    J = jordan_matrix(z, gamma)
    N = len(J)
    out = {}
    for i in range(N):
        for j in range(N):
            if J[i][j]:
                pi = gl_parity(p, q, m, n, i + 1)
                if pi != gl_parity(p, q, m, n, j + 1):  # pragma: no cover - excluded by the grouping
                    raise CompositionError("Jordan block straddles a parity boundary")
                out[("E", i + 1, j + 1)] = J[i][j] if pi else -J[i][j]
    return out


class GaudinSetup:
    """A Takiff sum over a gl base together with its enveloping algebra and the
    pseudo-differential ring over it."""

    def __init__(self, base, sing: SingularityData, z_floor: int = -8, d_floor: int = -8):
        self.base = base
        self.sing = sing
        self.lie = make_takiff_sum(base, sing.points, sing.orders)
        self.U = PBWAlgebra(self.lie)
        self.ring = PsdoRing(self.U, z_floor, d_floor)

    def with_floors(self, z_floor: int, d_floor: int) -> "GaudinSetup":
        out = object.__new__(GaudinSetup)
        out.base, out.sing, out.lie, out.U = self.base, self.sing, self.lie, self.U
        out.ring = self.ring.with_floors(z_floor, d_floor)
        return out


def psi_mu(setup: GaudinSetup, base_label, mu: Optional[Dict] = None, symbol: str = "z") -> TruncatedPsdo:
    """-Σ_i Σ_{k<γ_i} (A ⊗ t^k at site i) / (s - z_i)^{k+1} + μ(A), s = z or D."""
    ring = setup.ring
    U = setup.U
    out = ring.zero()
    for site, (zi, g) in enumerate(zip(setup.sing.points, setup.sing.orders)):
        for k in range(g):
            gen = U.gen((site, base_label, k))
            out = out - ring.pole_expand(zi, k + 1, symbol) * ring.const(gen)
    c = (mu or {}).get(base_label, 0)
    if c:
        out = out + ring.const(U.scalar(c))
    return out


def _entries(setup: GaudinSetup, s=None) -> PsdoEntries:
    return PsdoEntries(setup.ring)


def build_Ld(d: int, mu: Optional[Dict], setup: GaudinSetup) -> TypedMatrix:
    """[δ_ij D + Ψ^μ(e_ij ⊗ t^{-1})]."""
    ring = setup.ring
    rows = []
    for i in range(1, d + 1):
        row = []
        for j in range(1, d + 1):
            e = psi_mu(setup, ("e", i, j), mu)
            if i == j:
                e = ring.d() + e
            row.append(e)
        rows.append(row)
    return TypedMatrix(rows, (0,) * d, _entries(setup))


def build_Ld_hat(d: int, mu: Optional[Dict], setup: GaudinSetup) -> TypedMatrix:
    """-[ω(δ_ij D - Ψ^μ(e_ji ⊗ t^{-1}))], obtained by applying ω entrywise."""
    ring = setup.ring
    rows = []
    for i in range(1, d + 1):
        row = []
        for j in range(1, d + 1):
            inner = -psi_mu(setup, ("e", j, i), mu)
            if i == j:
                inner = ring.d() + inner
            row.append(-omega(inner))
        rows.append(row)
    return TypedMatrix(rows, (0,) * d, _entries(setup))


def build_Ld_hat_jordan(w: Sequence, xi: Sequence[int], setup: GaudinSetup) -> TypedMatrix:
    """The same matrix written as J^t - [Σ e_ab ⊗ t^k / (D - z_i)^{k+1}]^t with
    J = ⊕ (-J_ξa(w_a - z)), for the Jordan functional of (w, ξ)."""
    ring = setup.ring
    d = sum(xi)
    rows = []
    pos_blocks = []
    pos = 0
    for wa, g in zip(w, xi):
        pos_blocks.append((pos, g, Q(wa)))
        pos += g
    for a in range(1, d + 1):
        row = []
        for b in range(1, d + 1):
            # (J^t)_{ab} = J_{ba}; J = -J_ξ(w - z): diagonal z - w, superdiagonal -1
            entry = ring.zero()
            for start, g, wa in pos_blocks:
                if start < a <= start + g and start < b <= start + g:
                    if a == b:
                        entry = ring.z() - ring.const(setup.U.scalar(wa))
                    elif a == b + 1:
                        entry = ring.const(setup.U.scalar(-1))
            row.append(entry + psi_mu(setup, ("e", b, a), None, symbol="d"))
        rows.append(row)
    return TypedMatrix(rows, (0,) * d, _entries(setup))


def gl_type(p: int, q: int, m: int, n: int) -> Tuple[int, ...]:
    return (0,) * p + (1,) * q + (0,) * m + (1,) * n


def build_Ls(p: int, q: int, m: int, n: int, mu: Optional[Dict], setup: GaudinSetup) -> TypedMatrix:
    """[δ_ij D + (-1)^{|i|} Ψ^μ(E^i_j ⊗ t^{-1})], of type (0^p, 1^q, 0^m, 1^n)."""
    ring = setup.ring
    N = p + q + m + n
    rows = []
    for i in range(1, N + 1):
        sgn = -1 if gl_parity(p, q, m, n, i) else 1
        row = []
        for j in range(1, N + 1):
            e = psi_mu(setup, ("E", i, j), mu)
            if sgn < 0:
                e = -e
            if i == j:
                e = ring.d() + e
            row.append(e)
        rows.append(row)
    return TypedMatrix(rows, gl_type(p, q, m, n), _entries(setup))


def build_Ls_jordan(p: int, q: int, m: int, n: int, z: Sequence, gamma: Sequence[int],
                    setup: GaudinSetup) -> TypedMatrix:
    """J' - [(-1)^{|i|} Σ E^i_j ⊗ t^k / (z - w_a)^{k+1}] with J' = ⊕(-J_γi(z_i - D))."""
    ring = setup.ring
    check_gl_composition(p, q, m, n, gamma)
    N = p + q + m + n
    J = jordan_matrix(z, gamma)
    rows = []
    for i in range(1, N + 1):
        sgn = -1 if gl_parity(p, q, m, n, i) else 1
        row = []
        for j in range(1, N + 1):
            entry = ring.zero()
            if i == j:
                entry = ring.d() - ring.const(setup.U.scalar(J[i - 1][i - 1]))
            elif J[i - 1][j - 1]:
                entry = ring.const(setup.U.scalar(-J[i - 1][j - 1]))
            pole = psi_mu(setup, ("E", i, j), None)
            entry = entry + (pole if sgn > 0 else -pole)
            row.append(entry)
        rows.append(row)
    return TypedMatrix(rows, gl_type(p, q, m, n), _entries(setup))


def extract_generators(series: TruncatedPsdo, role: str = "cdet_d", include_scalars: bool = False):
    """Window coefficients of a generating series.

    Returns a list of dicts ``{"role", "z", "d", "element"}`` sorted by
    descending D-exponent then z-exponent.  Scalar coefficients (such as the
    leading 1) are skipped unless requested.
    """
    if role not in ("cdet_d", "cdet_d_hat", "ber_s"):
        raise ValueError(f"unknown role {role!r}")
    cz = series.ring.coeffs
    out = []
    for (i, j), c in series.sorted_items():
        if not include_scalars and cz.scalar_value(c) is not None:
            continue
        out.append({"role": role, "z": i, "d": j, "element": c})
    return out
