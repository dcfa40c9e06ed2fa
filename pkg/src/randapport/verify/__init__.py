"""Small-instance reproductions of the impossibility result, pitfalls and bijection, plus statistics."""

from __future__ import annotations

import itertools

from ..core import PopulationProfile
from .bijection import enumerate_b_matchings, verify_bijection
from .hunters import hunt_alabama, hunt_huntington_hill_quota, recheck_alabama, recheck_quota_violation
from .pitfalls import (
    check_flow_network,
    is_toxic,
    monotone_successors,
    toxicity_witness,
    verify_example1,
    verify_pitfall_example2,
    verify_pitfalls,
)
from .quota import QuotaAllocationSet, enumerate_quota_allocations, quota_sequences
from .stats import (
    StatReport,
    exact_negcorr,
    stat_exante,
    stat_marginals,
    stat_negcorr,
    stat_rounding_marginals,
)
from .theorem1 import verify_theorem1

SUITES = ("theorem1", "pitfalls", "bijection", "stats")


def small_profiles(max_states: int = 3, max_total: int = 8):
    """Every profile with 2..max_states states and total population <= max_total."""
    for n in range(2, max_states + 1):
        for pops in itertools.product(range(1, max_total + 1), repeat=n):
            if sum(pops) <= max_total:
                yield PopulationProfile(pops)


def bijection_sweep(max_states: int = 3, max_total: int = 8) -> dict:
    results = [verify_bijection(p) for p in small_profiles(max_states, max_total)]
    failed = [r for r in results if not r["certified"]]
    return {
        "check": "bijection",
        "profiles": len(results),
        "cases": [{"profile": r["profile"], "sequences": r["sequences"], "matchings": r["matchings"]} for r in results],
        "failures": failed,
        "certified": not failed,
    }


def stats_suite(seed: int, samples: int) -> dict:
    from ..core import profile
    from ..methods import grimmett

    report = stat_exante(grimmett, profile(1, 1), 1, samples, seed)
    return {
        "check": "stats",
        "grimmett_p11_h1": report.to_json(),
        "failures": report.failures(),
        "certified": report.passed,
    }


def run_suite(name: str, seed: int = 0, samples: int = 100_000) -> dict:
    if name == "theorem1":
        return verify_theorem1()
    if name == "pitfalls":
        return verify_pitfalls()
    if name == "bijection":
        return bijection_sweep()
    if name == "stats":
        return stats_suite(seed, samples)
    raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")


__all__ = [
    "QuotaAllocationSet",
    "SUITES",
    "StatReport",
    "bijection_sweep",
    "check_flow_network",
    "enumerate_b_matchings",
    "enumerate_quota_allocations",
    "exact_negcorr",
    "hunt_alabama",
    "hunt_huntington_hill_quota",
    "is_toxic",
    "monotone_successors",
    "quota_sequences",
    "recheck_alabama",
    "recheck_quota_violation",
    "run_suite",
    "small_profiles",
    "stat_exante",
    "stat_marginals",
    "stat_negcorr",
    "stat_rounding_marginals",
    "toxicity_witness",
    "verify_bijection",
    "verify_example1",
    "verify_pitfall_example2",
    "verify_pitfalls",
    "verify_theorem1",
]
