"""Exhaustive searches for paradoxes of the deterministic baselines."""

from __future__ import annotations

import itertools
from typing import Optional

from ..core import PopulationProfile, check_house_monotone_step, check_quota
from ..methods import hamilton, huntington_hill


def hunt_alabama(n: int = 3, max_pop: int = 10, max_house: int = 20) -> Optional[dict]:
    """First (profile, h) where Hamilton takes a seat away as h goes to h + 1."""
    for pops in itertools.product(range(1, max_pop + 1), repeat=n):
        prof = PopulationProfile(pops)
        prev = hamilton(prof, 1)
        for h in range(1, max_house):
            nxt = hamilton(prof, h + 1)
            if not check_house_monotone_step(prof, h, prev, nxt):
                loser = next(i for i in range(n) if nxt[i] < prev[i])
                return {"profile": list(pops), "house": h, "before": list(prev.seats), "after": list(nxt.seats), "state": loser + 1}
            prev = nxt
    return None


def hunt_huntington_hill_quota(n: int = 3, max_pop: int = 10, max_house: int = 20) -> Optional[dict]:
    """First (profile, h) where Huntington-Hill violates quota."""
    for pops in itertools.product(range(1, max_pop + 1), repeat=n):
        prof = PopulationProfile(pops)
        for h in range(1, max_house + 1):
            a = huntington_hill(prof, h)
            if not check_quota(prof, h, a):
                return {"profile": list(pops), "house": h, "seats": list(a.seats)}
    return None


def recheck_alabama(w: dict) -> bool:
    prof = PopulationProfile(tuple(w["profile"]))
    h = w["house"]
    return not check_house_monotone_step(prof, h, hamilton(prof, h), hamilton(prof, h + 1))


def recheck_quota_violation(w: dict) -> bool:
    prof = PopulationProfile(tuple(w["profile"]))
    return not check_quota(prof, w["house"], huntington_hill(prof, w["house"]))
