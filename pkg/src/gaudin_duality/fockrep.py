"""Weight spaces of the Fock space and the Gaudin action on them.

A weight space is spanned by Fock monomials, so restricting an operator is a
matter of applying it to each basis monomial and reading off coordinates.
All linear algebra is exact over the rationals: characteristic polynomials
come from the division-free Berkowitz recursion and squarefreeness from a
Euclidean gcd with the derivative.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .duality import DualityScenario, FockImages, QuantumSides, _in_box, _short
from .gaudin import extract_generators
from .superpoly import SuperPoly
from .weylalg import WeylElement, weyl_act

DEFAULT_MAX_DIM = 64


class LeakageError(ValueError):
    """An operator maps a basis vector outside the space."""

    def __init__(self, message: str, witness: str):
        super().__init__(message)
        self.witness = witness


class DimensionCapExceeded(ValueError):
    pass


class WeightSpaceBasis:
    """Fock monomials spanning V(k)_μ, with the data (k, μ) that cut it out.

    ``mu`` maps a gl index r (1-based) to μ(E^r_r).
    """

    def __init__(self, sc: DualityScenario, k: Tuple[int, ...], mu: Dict[int, int], monomials: Sequence):
        self.sc = sc
        self.k = tuple(k)
        self.mu = dict(mu)
        fock = sc.profile.fock
        self.monomials = tuple(sorted(monomials, key=fock.sort_key))
        self.index = {m: i for i, m in enumerate(self.monomials)}

    @property
    def dim(self) -> int:
        return len(self.monomials)

    def vector(self, i: int) -> SuperPoly:
        return SuperPoly(self.sc.profile.fock, {self.monomials[i]: 1})

    def labels(self) -> List[str]:
        fock = self.sc.profile.fock
        return [fock.format_monomial(m) or "1" for m in self.monomials]

    def __repr__(self):
        return f"WeightSpaceBasis(k={self.k}, mu={self.mu}, dim={self.dim})"


# operators cutting out the spaces

def cartan_images(sc: DualityScenario, images: Optional[FockImages] = None) -> Dict[int, WeylElement]:
    """Diagonal action of E^r_r: the sum over sites of φ_s(E^r_r ⊗ 1)."""
    images = images or FockImages(sc)
    W = sc.profile.weyl
    out = {}
    for r in range(1, sc.p + sc.q + sc.m + sc.n + 1):
        out[r] = sum((images.s((s, ("E", r, r), 0)) for s in range(len(sc.xi))), W.zero())
    return out


def gl_d_cartan_images(sc: DualityScenario, images: Optional[FockImages] = None) -> Dict[int, WeylElement]:
    """Diagonal action of e_aa: the sum over sites of φ_d(e_aa ⊗ 1)."""
    images = images or FockImages(sc)
    W = sc.profile.weyl
    return {a: sum((images.d((i, ("e", a, a), 0)) for i in range(len(sc.gamma))), W.zero())
            for a in range(1, sc.d + 1)}


def _blocks(sc: DualityScenario) -> List[Tuple[int, int]]:
    """(d_a, d_{a+1}) for each block of ξ."""
    return list(zip(sc.d_parts[:-1], sc.d_parts[1:]))


def block_degree_operators(sc: DualityScenario) -> List[WeylElement]:
    """For each block of ξ, Σ_α (Σ_i x^α_i ∂_{x^α_i} - Σ_r y^α_r ∂_{y^α_r})."""
    P = sc.profile
    out = []
    for lo, hi in _blocks(sc):
        op = P.weyl.zero()
        for a in range(lo + 1, hi + 1):
            for i in range(1, sc.m + sc.n + 1):
                op = op + P.x(a, i) * P.dx(a, i)
            for r in range(1, sc.p + sc.q + 1):
                op = op - P.y(a, r) * P.dy(a, r)
        out.append(op)
    return out


def eigenvalue(op: WeylElement, mono) -> Optional[Fraction]:
    """λ if ``op`` maps the monomial to λ times itself, else None."""
    fock = op.algebra.profile.fock
    img = weyl_act(op, SuperPoly(fock, {mono: 1}))
    if not img.terms:
        return Fraction(0)
    if set(img.terms) != {mono}:
        return None
    return Fraction(img.terms[mono])


# enumeration

def _column_monomials(sc: DualityScenario, kind: str, col: int, degree: int):
    """Monomials in the column {kind^α_col : α = 1..d} of the given degree, as
    lists of (variable index, exponent)."""
    P = sc.profile
    idx = [P.var_index(kind, a, col) for a in range(1, sc.d + 1)]
    odd = P.parities[idx[0]]
    if degree < 0:
        return []
    out = []
    if odd:
        for chosen in itertools.combinations(idx, degree):
            out.append([(v, 1) for v in chosen])
        return out
    for comp in _compositions(degree, len(idx)):
        out.append([(v, e) for v, e in zip(idx, comp) if e])
    return out


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _products(sc: DualityScenario, counts: Dict[Tuple[str, int], int], max_dim: int):
    columns = [_column_monomials(sc, kind, col, c) for (kind, col), c in sorted(counts.items())]
    size = 1
    for c in columns:
        size *= len(c)
    if size > max_dim * 64:
        raise DimensionCapExceeded(f"{size} candidate monomials for a space capped at {max_dim}")
    for combo in itertools.product(*columns):
        yield tuple(sorted(pair for part in combo for pair in part))


def _y_columns(sc):
    return range(1, sc.p + sc.q + 1)


def _x_columns(sc):
    return range(1, sc.m + sc.n + 1)


def enumerate_weight_space(sc: DualityScenario, k: Sequence[int], mu: Dict[int, int],
                           max_dim: int = DEFAULT_MAX_DIM, images: Optional[FockImages] = None) -> WeightSpaceBasis:
    """Basis of V(k)_μ from the gl_{p+m|q+n} side.

    E^r_r acts by -Σ_α y^α_r ∂ + (-1)^{|r|+1} d for a y column r and by
    Σ_α x^α_i ∂ for the x column p+q+i, which fixes the column degrees;
    the block degrees are then filtered by applying the degree operators, and
    every basis monomial is checked to be a joint eigenvector of the Cartan
    images with the prescribed eigenvalues.
    """
    k = tuple(k)
    if len(k) != len(sc.xi):
        raise ValueError(f"k needs one entry per block of xi, got {k}")
    counts = {}
    for r in _y_columns(sc):
        counts[("y", r)] = (sc.d if sc.gl_parity(r) else -sc.d) - mu[r]
    for i in _x_columns(sc):
        counts[("x", i)] = mu[sc.p + sc.q + i]
    if any(c < 0 for c in counts.values()):
        return WeightSpaceBasis(sc, k, mu, ())
    degs = block_degree_operators(sc)
    cart = cartan_images(sc, images)
    basis = []
    for mono in _products(sc, counts, max_dim):
        if all(eigenvalue(op, mono) == ka for op, ka in zip(degs, k)):
            for r, op in cart.items():
                if eigenvalue(op, mono) != mu[r]:
                    raise AssertionError(f"monomial {mono} is not of weight {mu}")
            basis.append(mono)
            if len(basis) > max_dim:
                raise DimensionCapExceeded(f"weight space exceeds the dimension cap {max_dim}")
    return WeightSpaceBasis(sc, k, mu, basis)


def dual_weights(sc: DualityScenario, mu: Dict[int, int]) -> Dict[int, int]:
    """μ̄_r = μ(E^r_r) + (-1)^{|r|} d for r <= p+q, μ(E^r_r) otherwise."""
    out = {}
    for r, v in mu.items():
        if r <= sc.p + sc.q:
            out[r] = v + (-sc.d if sc.gl_parity(r) else sc.d)
        else:
            out[r] = v
    return out


def enumerate_dual_space(sc: DualityScenario, k: Sequence[int], mu_bar: Dict[int, int],
                         max_dim: int = DEFAULT_MAX_DIM, images: Optional[FockImages] = None) -> Tuple:
    """Monomials of W(μ̄)_[k] from the gl_d side.

    W(μ̄) has y column r of degree -μ̄_r and x column i of degree μ̄_{p+q+i};
    the [k] condition Σ_{α in block a} η(e_αα) = k_a + (m-n) ξ_a is read off
    from the action of the e_αα images.
    """
    counts = {}
    for r in _y_columns(sc):
        counts[("y", r)] = -mu_bar[r]
    for i in _x_columns(sc):
        counts[("x", i)] = mu_bar[sc.p + sc.q + i]
    if any(c < 0 for c in counts.values()):
        return ()
    cart = gl_d_cartan_images(sc, images)
    shift = sc.m - sc.n
    out = []
    for mono in _products(sc, counts, max_dim):
        ok = True
        for (lo, hi), ka, xa in zip(_blocks(sc), k, sc.xi):
            total = 0
            for a in range(lo + 1, hi + 1):
                ev = eigenvalue(cart[a], mono)
                if ev is None:
                    raise AssertionError(f"monomial {mono} is not a gl_d weight vector")
                total += ev
            if total != ka + shift * xa:
                ok = False
                break
        if ok:
            out.append(mono)
    return tuple(sorted(out, key=sc.profile.fock.sort_key))


def weight_decomposition(sc: DualityScenario, max_count: int, images: Optional[FockImages] = None) -> Dict:
    """Group all monomials with at most ``max_count`` variables (with
    multiplicity) by (k, μ), computed from the operator eigenvalues."""
    P = sc.profile
    degs = block_degree_operators(sc)
    cart = cartan_images(sc, images)
    nv = len(P.variables)
    groups: Dict = {}

    def rec(v, left, acc):
        if v == nv:
            mono = tuple(acc)
            k = tuple(int(eigenvalue(op, mono)) for op in degs)
            mu = tuple(int(eigenvalue(cart[r], mono)) for r in sorted(cart))
            groups.setdefault((k, mu), []).append(mono)
            return
        top = 1 if P.parities[v] else left
        for e in range(min(top, left) + 1):
            rec(v + 1, left - e, acc + ([(v, e)] if e else []))

    rec(0, max_count, [])
    return groups


# restriction

class GeneratorMatrix:
    """Exact square matrix of an operator on a weight space; column j is the
    image of basis vector j."""

    def __init__(self, rows: List[List[Fraction]], tag: str = ""):
        self.rows = rows
        self.tag = tag

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __eq__(self, other):
        return isinstance(other, GeneratorMatrix) and self.rows == other.rows

    def __repr__(self):
        return f"GeneratorMatrix({self.tag!r}, {self.rows})"


def restrict(op: WeylElement, basis: WeightSpaceBasis, tag: str = "") -> GeneratorMatrix:
    n = basis.dim
    rows = [[Fraction(0)] * n for _ in range(n)]
    fock = basis.sc.profile.fock
    for j in range(n):
        img = weyl_act(op, basis.vector(j))
        for mono, c in img.terms.items():
            i = basis.index.get(mono)
            if i is None:
                w = fock.format_monomial(mono) or "1"
                raise LeakageError(f"operator {tag or _short(op, 80)} maps basis vector "
                                   f"{basis.labels()[j]} outside the space (term {w})", w)
            rows[i][j] = Fraction(c)
    return GeneratorMatrix(rows, tag)


# exact linear algebra

def mat_mul(A, B):
    n, m = len(A), len(B[0]) if B else 0
    return [[sum((A[i][t] * B[t][j] for t in range(len(B))), Fraction(0)) for j in range(m)] for i in range(n)]


def mat_vec(A, v):
    return [sum((a * x for a, x in zip(row, v)), Fraction(0)) for row in A]


def charpoly(A) -> List[Fraction]:
    """Coefficients of det(x I - A), highest degree first (Berkowitz)."""
    n = len(A)
    poly = [Fraction(1)]
    for r in range(n):
        a = A[r][r]
        R = A[r][:r]
        v = [A[i][r] for i in range(r)]
        t = [Fraction(1), -a]
        for _ in range(r):
            t.append(-sum((x * y for x, y in zip(R, v)), Fraction(0)))
            v = [sum((A[i][j] * v[j] for j in range(r)), Fraction(0)) for i in range(r)]
        poly = [sum((t[i - j] * poly[j] for j in range(len(poly)) if 0 <= i - j < len(t)), Fraction(0))
                for i in range(r + 2)]
    return poly


def _trim(p):
    i = 0
    while i < len(p) and p[i] == 0:
        i += 1
    return p[i:]


def poly_rem(a, b):
    a, b = _trim(list(a)), _trim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    while len(a) >= len(b) and a:
        f = a[0] / b[0]
        for i in range(len(b)):
            a[i] -= f * b[i]
        a = _trim(a[1:] if a[0] == 0 else a)
    return a


def poly_gcd(a, b) -> List[Fraction]:
    """Monic gcd over Q."""
    a, b = _trim([Fraction(x) for x in a]), _trim([Fraction(x) for x in b])
    while b:
        a, b = b, poly_rem(a, b)
    if not a:
        return []
    return [x / a[0] for x in a]


def derivative(p):
    n = len(p) - 1
    return [c * (n - i) for i, c in enumerate(p[:-1])]


def is_squarefree(p) -> bool:
    return len(poly_gcd(p, derivative(p))) <= 1


def poly_div(a, b):
    """Quotient of exact polynomial division a / b."""
    a, b = _trim([Fraction(x) for x in a]), _trim([Fraction(x) for x in b])
    q = []
    while len(a) >= len(b):
        f = a[0] / b[0]
        q.append(f)
        for i in range(len(b)):
            a[i] -= f * b[i]
        a = a[1:]
    return q or [Fraction(0)]


def poly_at_matrix(p, A):
    """p(A) by Horner's rule."""
    n = len(A)
    out = [[Fraction(0)] * n for _ in range(n)]
    for c in p:
        out = mat_mul(out, A)
        for i in range(n):
            out[i][i] += c
    return out


def is_diagonalizable(A) -> bool:
    """True iff the squarefree part of the characteristic polynomial kills A,
    i.e. the minimal polynomial has no repeated factor."""
    cp = charpoly(A)
    red = poly_div(cp, poly_gcd(cp, derivative(cp)))
    return all(x == 0 for row in poly_at_matrix(red, A) for x in row)


class _Echelon:
    """Incrementally maintained row-echelon basis of a subspace of Q^n."""

    def __init__(self):
        self.rows: List[Tuple[int, List[Fraction]]] = []

    def reduce(self, v):
        v = list(v)
        for piv, row in self.rows:
            if v[piv]:
                f = v[piv] / row[piv]
                v = [x - f * y for x, y in zip(v, row)]
        return v

    def add(self, v) -> Optional[List[Fraction]]:
        v = self.reduce(v)
        for i, x in enumerate(v):
            if x:
                self.rows.append((i, v))
                return v
        return None

    @property
    def rank(self):
        return len(self.rows)


def krylov_dimension(mats: Sequence[GeneratorMatrix], v) -> int:
    """Dimension of the orbit of v under the unital algebra generated by mats."""
    ech = _Echelon()
    queue = []
    first = ech.add([Fraction(x) for x in v])
    if first is None:
        return 0
    queue.append([Fraction(x) for x in v])
    n = len(v)
    while queue and ech.rank < n:
        u = queue.pop()
        for M in mats:
            w = mat_vec(M.rows, u)
            if ech.add(w) is not None:
                queue.append(w)
    return ech.rank


def _random_rational(rng: random.Random, lo: int = -9, hi: int = 9, den: int = 4) -> Fraction:
    return Fraction(rng.randint(lo, hi) or hi, rng.randint(1, den))


def sample_points(rng: random.Random, count: int, exclude: Sequence = ()) -> List[Fraction]:
    """Distinct random rationals, avoiding ``exclude``."""
    out: List[Fraction] = []
    seen = set(Fraction(x) for x in exclude)
    while len(out) < count:
        x = Fraction(rng.randint(-12, 12), rng.randint(1, 5))
        if x not in seen:
            seen.add(x)
            out.append(x)
    return out


def check_spectral_claims(mats: Sequence[GeneratorMatrix], seed: int = 0, retries: int = 3) -> Dict:
    """Pairwise commutation, cyclicity and simple spectrum of a family.

    Cyclicity tries the basis vectors, then the all-ones vector, then seeded
    random vectors.  Simple spectrum draws a random rational combination and
    tests its characteristic polynomial for squarefreeness, resampling at most
    ``retries`` times.
    """
    rng = random.Random(seed)
    n = mats[0].dim if mats else 0
    # (a) commutation
    comm_witness = None
    pairs = 0
    for (i, A), (j, B) in itertools.combinations(enumerate(mats), 2):
        pairs += 1
        if mat_mul(A.rows, B.rows) != mat_mul(B.rows, A.rows):
            comm_witness = {"a": A.tag or i, "b": B.tag or j}
            break
    # (b) cyclicity
    candidates = []
    for i in range(n):
        candidates.append(("basis", i, [Fraction(int(t == i)) for t in range(n)]))
    candidates.append(("ones", None, [Fraction(1)] * n))
    for t in range(4):
        candidates.append(("random", t, [_random_rational(rng) for _ in range(n)]))
    cyclic_vector = None
    for kind, label, v in candidates:
        if n == 0 or krylov_dimension(mats, v) == n:
            cyclic_vector = {"kind": kind, "index": label, "vector": [str(x) for x in v]}
            break
    # (c) simple spectrum
    attempts = []
    simple = False
    for attempt in range(retries + 1):
        coeffs = [_random_rational(rng) for _ in mats]
        comb = [[sum((c * M.rows[i][j] for c, M in zip(coeffs, mats)), Fraction(0)) for j in range(n)]
                for i in range(n)]
        cp = charpoly(comb)
        ok = is_squarefree(cp)
        attempts.append({"coefficients": [str(c) for c in coeffs], "charpoly": [str(c) for c in cp],
                         "squarefree": ok})
        if ok:
            simple = True
            break
    return {
        "dim": n,
        "matrices": len(mats),
        "commute": comm_witness is None,
        "commute_pairs": pairs,
        "commute_witness": comm_witness,
        "cyclic": cyclic_vector is not None,
        "cyclic_vector": cyclic_vector,
        "simple_spectrum": simple,
        "resamples": len(attempts) - 1,
        "spectrum_attempts": attempts,
        "pass": comm_witness is None and cyclic_vector is not None and simple,
    }


# the suite

def generator_operators(sc: DualityScenario, window=None, sides: Optional[QuantumSides] = None) -> List[Tuple[str, WeylElement]]:
    """Window-extracted Gaudin generators on both sides, as Weyl operators:
    coefficients of φ_s(Ber L_s) and of φ_d(cdet L̂_d)."""
    win = window or sc.commutator_window
    qs = sides or QuantumSides(sc, win.z_min - 2, win.d_min - 2)
    out = []
    for role, series in (("ber_s", qs.ber_s()), ("cdet_d_hat", qs.cdet_d())):
        for g in extract_generators(series, role):
            if _in_box((g["z"], g["d"]), series.window, win):
                out.append((f"{role}[z^{g['z']} D^{g['d']}]", g["element"]))
    return out


def analyse_weight_space(sc: DualityScenario, k, mu, operators, seed: int = 0, retries: int = 3,
                         max_dim: int = DEFAULT_MAX_DIM, images: Optional[FockImages] = None) -> Dict:
    """Restrict the generators to V(k)_μ and check the spectral claims.

    A simple spectrum is only required when every block of ξ has size one:
    otherwise the Jordan functional of w has a nilpotent centralizer, whose
    diagonal action commutes with the Gaudin algebra and keeps it from being
    diagonalizable.  In that case a non-diagonalizable generator is reported.
    """
    basis = enumerate_weight_space(sc, k, mu, max_dim, images)
    mu_bar = dual_weights(sc, mu)
    dual = enumerate_dual_space(sc, k, mu_bar, max_dim, images)
    leak = None
    mats = []
    for tag, op in operators:
        try:
            mats.append(restrict(op, basis, tag))
        except LeakageError as e:
            leak = {"operator": tag, "witness": e.witness}
            break
    spectral = check_spectral_claims(mats, seed, retries) if leak is None and basis.dim else None
    semisimple = all(x == 1 for x in sc.xi)
    nondiag = None
    if spectral is not None and not semisimple:
        nondiag = next((M.tag for M in mats if not is_diagonalizable(M.rows)), None)
    same = set(basis.monomials) == set(dual)
    ok = leak is None and same
    if spectral is not None:
        ok = ok and spectral["commute"] and spectral["cyclic"] and (spectral["simple_spectrum"] or not semisimple)
    return {
        "k": list(basis.k),
        "mu": {str(r): v for r, v in sorted(mu.items())},
        "mu_bar": {str(r): v for r, v in sorted(mu_bar.items())},
        "dim": basis.dim,
        "basis": basis.labels(),
        "dual_basis_equal": same,
        "leakage": leak,
        "spectral": spectral,
        "simple_spectrum_required": semisimple,
        "non_diagonalizable_generator": nondiag,
        "pass": ok,
    }


def spectrum_scenarios(seed: int) -> List[DualityScenario]:
    """The γ = (1^ℓ) scenarios of the weight-space suite: p = m = 1, d = 2 with
    ξ = (1, 1) and ξ = (2), at random distinct rational points."""
    rng = random.Random(seed)
    out = []
    for xi in ((1, 1), (2,)):
        w = sample_points(rng, len(xi))
        z = sample_points(rng, 2)
        out.append(DualityScenario(2, p=1, m=1, xi=list(xi), gamma=[1, 1], w=w, z=z,
                                   name="spectrum_xi" + "".join(map(str, xi))))
    return out


def pick_weight_spaces(sc: DualityScenario, max_count: int = 6, lo: int = 2, hi: int = 16,
                       limit: int = 3, images: Optional[FockImages] = None) -> List[Tuple]:
    """Deterministic choice of (k, μ) with lo <= dim <= hi among monomials with
    at most ``max_count`` variables, largest dimension first."""
    groups = weight_decomposition(sc, max_count, images)
    N = sc.p + sc.q + sc.m + sc.n
    picked = []
    for (k, mu), monos in sorted(groups.items(), key=lambda kv: (-len(kv[1]), kv[0])):
        mu_map = {r: mu[r - 1] for r in range(1, N + 1)}
        # a group is the whole space only if no monomial of the space is larger
        if lo <= len(monos) <= hi and len(enumerate_weight_space(sc, k, mu_map, hi, images).monomials) == len(monos):
            picked.append((k, mu_map))
    return picked[:limit]


def spectrum_suite(seed: int = 0, retries: int = 3, spaces_per_scenario: int = 3,
                   max_dim: int = DEFAULT_MAX_DIM, scenarios: Optional[Sequence[DualityScenario]] = None) -> Dict:
    reports = []
    for sc in scenarios or spectrum_scenarios(seed):
        if any(g != 1 for g in sc.gamma):
            raise ValueError("the weight-space suite needs gamma = (1, ..., 1)")
        images = FockImages(sc)
        ops = generator_operators(sc)
        spaces = pick_weight_spaces(sc, limit=spaces_per_scenario, hi=min(16, max_dim), images=images)
        for idx, (k, mu) in enumerate(spaces):
            rep = analyse_weight_space(sc, k, mu, ops, seed * 1000 + idx, retries, max_dim, images)
            rep["scenario"] = sc.to_dict()
            rep["generators"] = len(ops)
            reports.append(rep)
    simple = [r for r in reports if r["simple_spectrum_required"]]
    return {
        "check": "spectrum",
        "seed": seed,
        "spaces": reports,
        "simple_spectrum_spaces": len(simple),
        "pass": len(simple) >= 3 and all(r["pass"] for r in reports),
    }
