"""Command-line driver for the duality checks.

    gaudin-duality verify-duality --config scenarios/d1m1.json
    gaudin-duality verify-berezinian --seed 7 --trials 50
    gaudin-duality all --jobs 4 --out report.json

Exit status: 0 when every selected check passes, 1 on a failed check, 2 on a
bad configuration, 3 when a series window could not be reached.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from .duality import (BUILTIN_SCENARIOS, DualityScenario, QUADRANTS, ScenarioError, builtin_scenario,
                      parse_window, read_config, verify_classical_duality, verify_generator_commutativity,
                      verify_homomorphisms, verify_image_equality_evidence, verify_quantum_duality)
from .psdo import PrecisionExhausted
from .scalars import mpq, mpz, to_str

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_PRECISION = 0, 1, 2, 3

SCENARIO_SUITES = ("duality", "classical", "homs", "commutativity")
COMMANDS = {
    "verify-duality": ("duality",),
    "verify-classical": ("classical",),
    "verify-homs": ("homs",),
    "verify-berezinian": ("berezinian",),
    "spectrum": ("spectrum",),
    "all": SCENARIO_SUITES + ("berezinian", "spectrum"),
}


def jsonable(obj):
    """Strip private keys and turn exact scalars into strings."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items() if not str(k).startswith("_")}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (Fraction, mpq, mpz)):
        return to_str(obj)
    return obj


# tasks run in worker processes; each returns (report, seconds)

def _scenario_task(suite: str, data: Dict, opts: Dict) -> Dict:
    sc = DualityScenario.from_dict(data)
    window = parse_window(opts["window"]) if opts.get("window") else None
    if suite == "duality":
        rep = verify_quantum_duality(sc, flip=opts.get("flip"), window=window)
        ev = verify_image_equality_evidence(sc, rep["_sides"], flip=opts.get("flip"))
        return {"check": "duality", "scenario": sc.name, "pass": rep["pass"] and ev["pass"],
                "quantum": rep, "image_evidence": ev}
    if suite == "classical":
        return verify_classical_duality(sc, flip=opts.get("flip"), window=window)
    if suite == "homs":
        rep = verify_homomorphisms(sc)
        if opts.get("cross") == "howe":
            res = rep["results"]
            rep["pass"] = all(v["pass"] for k, v in res.items() if k != "cross_all_pairs")
            rep["cross_policy"] = "howe"
        return rep
    if suite == "commutativity":
        return verify_generator_commutativity(sc, universal=sc.d <= 2)
    raise ValueError(suite)


def run_task(task) -> Dict:
    suite, data, opts = task
    t0 = time.perf_counter()
    try:
        if suite == "berezinian":
            from .ncmatrix import berezinian_suite
            rep = berezinian_suite(opts["seed"], opts["trials"])
        elif suite == "spectrum":
            from .fockrep import spectrum_suite
            scs = [DualityScenario.from_dict(data)] if data else None
            rep = spectrum_suite(opts["seed"], scenarios=scs)
        else:
            rep = _scenario_task(suite, data, opts)
    except PrecisionExhausted as exc:
        rep = {"check": suite, "scenario": (data or {}).get("name"), "pass": False,
               "error": "precision_exhausted", "message": str(exc)}
    rep = jsonable(rep)
    rep.setdefault("check", suite)
    return {"report": rep, "seconds": round(time.perf_counter() - t0, 3)}


def _load_configs(paths: Sequence[str]) -> List[Dict]:
    out = []
    for path in paths:
        data = read_config(path)
        data.setdefault("name", path.rsplit("/", 1)[-1].rsplit(".", 1)[0])
        # validate now so bad configs fail before any work starts
        DualityScenario.from_dict(data)
        suites = data.get("suites", list(SCENARIO_SUITES))
        bad = [s for s in suites if s not in SCENARIO_SUITES]
        if bad:
            raise ScenarioError(f"unknown suites {bad}; choose from {list(SCENARIO_SUITES)}")
        out.append(data)
    return out


def plan(command: str, configs: List[Dict], args) -> List[tuple]:
    opts = {"seed": args.seed, "trials": args.trials, "window": args.window,
            "flip": getattr(args, "flip", None), "cross": getattr(args, "cross", "all")}
    explicit = bool(configs)
    if not explicit:
        configs = [builtin_scenario(n).to_dict() for n in BUILTIN_SCENARIOS]
    tasks = []
    for suite in COMMANDS[command]:
        if suite == "berezinian":
            tasks.append((suite, None, opts))
        elif suite == "spectrum":
            if explicit and command == "spectrum":
                tasks.extend((suite, c, opts) for c in configs)
            else:
                tasks.append((suite, None, opts))
        else:
            for c in configs:
                if command == "all" and suite not in c.get("suites", SCENARIO_SUITES):
                    continue
                tasks.append((suite, {k: v for k, v in c.items() if k != "suites"}, opts))
    return tasks


def summary_line(rep: Dict, seconds: Optional[float]) -> str:
    verdict = "PASS" if rep.get("pass") else "FAIL"
    who = rep.get("scenario") or ""
    extra = ""
    if rep.get("error"):
        extra = f" [{rep['error']}] {rep.get('message', '')}"
    elif rep["check"] == "berezinian":
        extra = f" {rep['passed']}/{rep['trials']} trials"
    elif rep["check"] == "spectrum":
        extra = f" {len(rep['spaces'])} spaces, {rep['simple_spectrum_spaces']} with simple spectrum required"
    elif rep["check"] == "duality":
        extra = f" compared {rep['quantum']['compared']} coefficients"
        if not rep["quantum"]["pass"]:
            extra += f", witness {rep['quantum']['witness']}"
    elif "results" in rep:
        failed = [k for k, v in rep["results"].items() if not v["pass"]]
        if failed:
            extra = " failed: " + ", ".join(failed)
    elif rep.get("witness"):
        extra = f" witness {rep['witness']}"
    t = f" ({seconds:.1f}s)" if seconds is not None else ""
    return f"{verdict} {rep['check']} {who}{extra}{t}".replace("  ", " ")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gaudin-duality", description="Exact checks of the Gaudin duality.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", action="append", default=[], metavar="PATH",
                       help="scenario JSON (repeatable); defaults to the built-in scenarios")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--trials", type=int, default=50)
        p.add_argument("--window", default=None, help='"zmin,zmax,dmin,dmax"')
        p.add_argument("--out", default="report.json", help="JSON report path ('-' for stdout)")
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--timing", action="store_true", help="record wall times in the report")
        if name in ("verify-duality", "verify-classical"):
            p.add_argument("--flip", choices=QUADRANTS, default=None,
                           help="mutation: flip the sign of one quadrant of the s-side map")
        if name in ("verify-homs", "all"):
            p.add_argument("--cross", choices=("all", "howe"), default="all",
                           help="cross-side commutation required on all Takiff pairs or on the Howe pair only")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.window:
            parse_window(args.window)
        if args.trials < 1:
            raise ScenarioError("--trials must be positive")
        configs = _load_configs(args.config)
    except ScenarioError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    tasks = plan(args.command, configs, args)
    if args.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(run_task, tasks))
    else:
        results = [run_task(t) for t in tasks]
    reports = []
    for res in results:
        rep = res["report"]
        if args.timing:
            rep["seconds"] = res["seconds"]
        reports.append(rep)
        print(summary_line(rep, res["seconds"] if args.timing else None))
    ok = all(r["pass"] for r in reports)
    doc = {
        "command": args.command,
        "seed": args.seed,
        "trials": args.trials,
        "window": args.window,
        "scenarios": jsonable([DualityScenario.from_dict({k: v for k, v in c.items() if k != "suites"}).to_dict()
                               for c in configs] or [builtin_scenario(n).to_dict() for n in BUILTIN_SCENARIOS]),
        "pass": ok,
        "reports": reports,
    }
    text = json.dumps(doc, indent=1, sort_keys=True) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    elif args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    print(f"{'PASS' if ok else 'FAIL'}: {sum(r['pass'] for r in reports)}/{len(reports)} checks passed")
    if any(r.get("error") == "precision_exhausted" for r in reports):
        return EXIT_PRECISION
    return EXIT_PASS if ok else EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
