"""One test per acceptance criterion, each at its stated size and exact tolerance."""

import random
import time
from fractions import Fraction
from pathlib import Path

import pytest

from gaudin_duality import cli
from gaudin_duality.duality import (BUILTIN_SCENARIOS, builtin_scenario, verify_classical_duality,
                                    verify_generator_commutativity, verify_homomorphisms, verify_quantum_duality)
from gaudin_duality.envalg import PBWAlgebra, make_gl, make_takiff_sum
from gaudin_duality.fockrep import spectrum_suite
from gaudin_duality.ncmatrix import berezinian_suite
from gaudin_duality.psdo import QQ, PsdoRing, omega, psdo_invert, recenter
from gaudin_duality.scalars import Q
from gaudin_duality.weylalg import WeylProfile

from test_psdo import _agree, random_series

ROOT = Path(__file__).resolve().parents[1]
SWEEPS = ("phi_d", "phi_s", "phi_d_bar", "phi_s_bar")


def test_1_quantum_duality(criterion):
    t0 = time.perf_counter()
    reports = [verify_quantum_duality(builtin_scenario(n)) for n in BUILTIN_SCENARIOS]
    elapsed = time.perf_counter() - t0
    mutant = verify_quantum_duality(builtin_scenario("d2m2"), flip="xx")
    w = mutant["witness"]
    ok = (all(r["pass"] and r["compared"] > 0 for r in reports) and elapsed < 300
          and not mutant["pass"] and w is not None)
    compared = sum(r["compared"] for r in reports)
    criterion(1, ok, f"5/5 scenarios, {compared} coefficients, {elapsed:.0f}s; "
                     f"flipped xx sign caught at z^{w['z']} D^{w['d']}" if w else "mutation not caught")
    assert ok, [(r["scenario"], r["witness"]) for r in reports if not r["pass"]]


def test_2_classical_duality(criterion):
    t0 = time.perf_counter()
    reports = [verify_classical_duality(builtin_scenario(n)) for n in BUILTIN_SCENARIOS]
    elapsed = time.perf_counter() - t0
    ok = all(r["pass"] and r["compared"] > 0 for r in reports) and elapsed < 60
    criterion(2, ok, f"{sum(r['pass'] for r in reports)}/5 scenarios, {elapsed:.0f}s")
    assert ok, [(r["scenario"], r["witness"]) for r in reports if not r["pass"]]


@pytest.fixture(scope="module")
def hom_reports():
    return [verify_homomorphisms(builtin_scenario(n)) for n in BUILTIN_SCENARIOS]


def test_3_homomorphism_sweeps(hom_reports, criterion):
    sweeps_ok = all(r["results"][k]["pass"] for r in hom_reports for k in SWEEPS + ("howe_pair",))
    pairs = sum(r["results"][k]["pairs"] for r in hom_reports for k in SWEEPS)
    cross = [r["results"]["cross_all_pairs"] for r in hom_reports]
    cross_ok = all(c["pass"] for c in cross)
    detail = (f"bracket sweeps {pairs} pairs ok={sweeps_ok}; diagonal gl_d x gl actions commute; "
              f"cross images on all Takiff pairs commute on "
              f"{sum(c['commuting'] for c in cross)}/{sum(c['pairs'] for c in cross)} pairs")
    criterion(3, sweeps_ok and cross_ok, detail)
    assert sweeps_ok


@pytest.mark.xfail(strict=True, reason="images of non-diagonal Takiff elements do not supercommute; "
                                       "only the diagonal (Howe pair) actions do")
def test_3_cross_images_on_all_pairs(hom_reports):
    assert all(r["results"]["cross_all_pairs"]["pass"] for r in hom_reports)


def test_4_berezinian_suite(criterion):
    rep = berezinian_suite(seed=0, trials=50)
    kinds = {r["kind"] for r in rep["records"]}
    types = {tuple(r["type"]) for r in rep["records"]}
    mixed = any(0 in t and 1 in t for t in types)
    sizes_ok = all(len(t) <= 4 for t in types)
    ok = (rep["pass"] and rep["passed"] >= 50 and mixed and sizes_ok and kinds == {"supercommutative", "gaudin"}
          and all(s["pass"] for s in rep["specializations"]) and all(j["pass"] for j in rep["jordan_inverse"]))
    criterion(4, ok, f"{rep['passed']}/{rep['trials']} matrices, {len(rep['specializations'])} specializations, "
                     f"Jordan inverse k=1..{len(rep['jordan_inverse'])}")
    assert ok


def test_5_gaudin_commutativity(criterion):
    reports = []
    for n in BUILTIN_SCENARIOS:
        sc = builtin_scenario(n)
        reports.append(verify_generator_commutativity(sc, universal=sc.d <= 2))
    in_u = all(any(k.startswith("U:") for k in r["results"]) for r in reports)
    ok = all(r["pass"] for r in reports) and in_u
    pairs = sum(v["pairs"] for r in reports for v in r["results"].values())
    criterion(5, ok, f"{pairs} generator pairs over 5 scenarios, in U and in the Weyl algebra")
    assert ok, [(r["scenario"], r["results"]) for r in reports if not r["pass"]]


def test_6_weight_spaces(criterion):
    rep = spectrum_suite(seed=0)
    simple = [s for s in rep["spaces"] if s["simple_spectrum_required"]]
    ok = (rep["pass"] and len(simple) >= 3 and all(2 <= s["dim"] <= 16 for s in simple)
          and all(s["dual_basis_equal"] for s in rep["spaces"])
          and all(s["spectral"]["resamples"] <= 3 for s in simple))
    criterion(6, ok, f"{len(simple)} spaces with simple spectrum, dims {[s['dim'] for s in simple]}; "
                     f"{len(rep['spaces']) - len(simple)} xi=(2) spaces commute and are cyclic")
    assert ok


def _random_pbw(rng, U):
    out = U.zero()
    for _ in range(3):
        t = U.one() * rng.randint(-3, 3)
        for _ in range(rng.randint(0, 3)):
            t = t * U.gen(rng.choice(U.lie.labels))
        out = out + t
    return out


def _random_weyl(rng, P):
    gens = []
    for kind, cols in (("x", P.m + P.n), ("y", P.p + P.q)):
        for a in range(1, P.d + 1):
            for c in range(1, cols + 1):
                f, df = (P.x, P.dx) if kind == "x" else (P.y, P.dy)
                gens += [f(a, c), df(a, c)]
    out = P.weyl.zero()
    for _ in range(3):
        t = P.weyl.one() * rng.randint(-3, 3)
        for _ in range(rng.randint(0, 4)):
            t = t * rng.choice(gens)
        out = out + t
    return out


def _soundness_trial(seed):
    results = []
    for zf, df in ((-5, -5), (-7, -7), (-9, -14)):
        ring = PsdoRing(QQ, zf, df)
        rng = random.Random(seed)
        a, b = random_series(rng, ring), random_series(rng, ring)
        c = Fraction(rng.randint(-3, 3), 2)
        results.append([a * b, psdo_invert(a), omega(a), recenter(a, c), a + b * b])
    for small, mid, ref in zip(*results):
        assert _agree(small, ref) > 0 and _agree(mid, ref) > 0
        _agree(small, mid)


def test_7_infrastructure(criterion, tmp_path):
    for seed in range(100):
        _soundness_trial(seed)
    rng = random.Random(7)
    algebras = [PBWAlgebra(make_gl(1, 1, 0, 0)), PBWAlgebra(make_takiff_sum(make_gl(1, 1, 0, 0), [Q(0), Q(1)], [2, 1]))]
    for i in range(100):
        U = algebras[i % 2]
        a, b, c = (_random_pbw(rng, U) for _ in range(3))
        assert (a * b) * c == a * (b * c)
    profiles = [WeylProfile(2, 1, 1, 1, 1), WeylProfile(2, 0, 0, 1, 1)]
    for i in range(100):
        P = profiles[i % 2]
        a, b, c = (_random_weyl(rng, P) for _ in range(3))
        assert (a * b) * c == a * (b * c)
    same = []
    for args in (["verify-classical"], ["verify-berezinian", "--seed", "3"], ["spectrum", "--seed", "1"],
                 ["verify-duality", "--config", str(ROOT / "scenarios" / "d2m2.json")]):
        blobs = []
        for rep in ("a", "b"):
            out = tmp_path / f"{args[0]}-{rep}.json"
            cli.main(args + ["--out", str(out)])
            blobs.append(out.read_bytes())
        same.append(blobs[0] == blobs[1])
    ok = all(same)
    criterion(7, ok, "window soundness 100 trials, PBW and Weyl associativity 100 triples each, "
                     f"{sum(same)}/{len(same)} reports byte-identical across reruns")
    assert ok
