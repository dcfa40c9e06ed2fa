"""Command-line interface: ``randapport {apportion,round,verify,simulate}``.

Exit codes: 0 success, 1 a verification or audit failed, 2 malformed input,
3 infeasible configuration.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .applications import (
    InfeasibleConfig,
    assignment_from_json,
    run_assignment,
    run_sortition,
    sortition_from_json,
)
from .bipartite import InstanceError, WeightedBipartiteInstance
from .core import PopulationProfile, format_rational, standard_quota
from .cumulative import audit_outcome, build_layered_graph, cumulative_round
from .methods import HouseMonotoneMethod, grimmett, hamilton, huntington_hill, poisson_method
from .rng import check_seed

EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3

DETERMINISTIC = {"hamilton": hamilton, "huntington-hill": huntington_hill}
RANDOMIZED = ("grimmett", "poisson", "cumulative")


class InputError(Exception):
    pass


def _load_json(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        # decimals become exact rationals, never binary floats
        return json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def load_profile(path: str) -> tuple[list[str], PopulationProfile]:
    data = _load_json(path)
    try:
        states = data["states"]
        names = [s["name"] for s in states]
        pops = [s["population"] for s in states]
    except (KeyError, TypeError) as exc:
        raise InputError(f"{path}: expected {{\"states\": [{{\"name\": ..., \"population\": ...}}]}}") from exc
    if len(names) < 2:
        raise InputError(f"{path}: need at least 2 states")
    if len(set(names)) != len(names):
        raise InputError(f"{path}: state names must be unique")
    for name, p in zip(names, pops):
        if isinstance(p, bool) or not isinstance(p, int) or p < 1:
            raise InputError(f"{path}: population of {name} must be a positive integer, got {p!r}")
    return [str(n) for n in names], PopulationProfile(tuple(pops))


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _notice(msg: str) -> None:
    print(f"note: {msg}", file=sys.stderr)


def _seed(args, needed: bool) -> Optional[int]:
    if args.seed is None:
        if needed:
            _notice("no --seed given; using seed 0")
            return 0
        return None
    return check_seed(args.seed)


def cmd_apportion(args) -> int:
    names, prof = load_profile(args.profile)
    h = args.house
    if h < 1:
        raise InputError("--house must be positive")
    if args.method in DETERMINISTIC:
        if args.seed is not None:
            _notice(f"{args.method} is deterministic; --seed is ignored")
        if args.hmax is not None:
            _notice("--hmax only applies to the cumulative method; ignored")
        seed = None
        alloc = DETERMINISTIC[args.method](prof, h)
    else:
        seed = _seed(args, True)
        if args.method == "grimmett":
            alloc = grimmett(prof, h, seed)
        elif args.method == "poisson":
            alloc = poisson_method(prof, h, seed)
        else:
            if args.hmax is not None and h > args.hmax:
                raise InfeasibleConfig(f"house {h} exceeds --hmax {args.hmax}", ["raise --hmax or drop it"])
            alloc = HouseMonotoneMethod(seed, args.hmax)(prof, h)
    quota = standard_quota(prof, h)
    _emit(
        {
            "method": args.method,
            "seed": seed,
            "house": h,
            "seats": {n: a for n, a in zip(names, alloc.seats)},
            "quotas": {n: format_rational(q) for n, q in zip(names, quota.values)},
        }
    )
    return 0


def cmd_round(args) -> int:
    data = _load_json(args.instance)
    instance = WeightedBipartiteInstance.from_json(data)
    seed = _seed(args, True)
    lg = build_layered_graph(instance)
    outcome = cumulative_round(instance, seed, layered=lg)
    g = instance.graph
    D = outcome.degrees()
    result = {
        "seed": seed,
        "T": instance.T,
        "bits": [
            {"a": a, "b": b, "t": t + 1, "x": int(outcome.bits[t, k])}
            for t in range(instance.T)
            for k, (a, b) in enumerate(g.edges)
        ],
        "degrees": {v: [int(D[t, j]) for t in range(instance.T)] for j, v in enumerate(g.nodes)},
    }
    status = 0
    if args.audit:
        violations = audit_outcome(instance, outcome, lg)
        result["audit"] = violations
        if violations:
            status = EXIT_FAIL
    _emit(result)
    return status


def cmd_verify(args) -> int:
    from .verify import run_suite

    seed = check_seed(args.seed)
    if args.samples < 1000:
        raise InputError("--samples must be at least 1000")
    cert = run_suite(args.suite, seed=seed, samples=args.samples)
    _emit(cert)
    if not cert["certified"]:
        print(f"verification failed: {_first_failure(cert)}", file=sys.stderr)
        return EXIT_FAIL
    return 0


def _first_failure(cert: dict) -> str:
    for key in ("escaped", "failures", "problems"):
        if cert.get(key):
            return f"{cert['check']}: {cert[key][0]}"
    for key in ("example1", "example2"):
        sub = cert.get(key)
        if sub and not sub["certified"]:
            return _first_failure(sub)
    return cert.get("check", "unknown")


def cmd_simulate(args) -> int:
    data = _load_json(args.config)
    seed = _seed(args, True)
    if args.rounds is not None and args.rounds < 1:
        raise InputError("--rounds must be positive")
    try:
        if args.app == "sortition":
            result = run_sortition(sortition_from_json(data, args.rounds), seed)
        else:
            result = run_assignment(assignment_from_json(data, args.rounds), seed)
    except InfeasibleConfig:
        raise
    except (ValueError, TypeError) as exc:
        raise InputError(str(exc)) from exc
    csv_text = result.to_csv()
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(csv_text)
    else:
        sys.stderr.write(csv_text)
    _emit({"app": args.app, "seed": seed, "audit": result.audit})
    return 0 if result.audit["passed"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="randapport", description="Randomized apportionment and cumulative rounding.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("apportion", help="apportion seats for a population profile")
    p.add_argument("--method", required=True, choices=sorted(DETERMINISTIC) + list(RANDOMIZED))
    p.add_argument("--profile", required=True, help="JSON file {\"states\": [{\"name\", \"population\"}]}")
    p.add_argument("--house", required=True, type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--hmax", type=int, help="cumulative method: round only this many seats (T = hmax)")
    p.set_defaults(func=cmd_apportion)

    p = sub.add_parser("round", help="cumulative rounding of a weighted bipartite instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--audit", action="store_true", help="embed the list of violated guarantees")
    p.set_defaults(func=cmd_round)

    p = sub.add_parser("verify", help="run a verification suite and print its certificate")
    p.add_argument("--suite", required=True, choices=["theorem1", "pitfalls", "bijection", "stats"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=100_000)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="repeated sortition or course assignment")
    p.add_argument("--app", required=True, choices=["sortition", "assignment"])
    p.add_argument("--config", required=True)
    p.add_argument("--rounds", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="CSV output path (default: stderr)")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleConfig as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (InputError, InstanceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
