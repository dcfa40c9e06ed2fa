"""Machine check that quota and population monotonicity are incompatible.

Starting profile p^A (h = 10) gives state 1 either 8 or 9 seats under quota.
With 9 seats the remaining seat sits at some state j; relabel so that the
grown state of p^B is j, and every quota allocation on that profile loses
state 1 seats while one of the unchanged small states gains. With 8 seats the
other two seats sit at states j < k; relabel p^C so its two 44-populations are
at j and k, and every quota allocation on it gains state 1 a seat while j or
k loses one.
"""

from __future__ import annotations

from ..core import Apportionment, PopulationProfile, detect_population_paradox
from .quota import enumerate_quota_allocations

HOUSE = 10
P_A = (824, 44, 44, 44, 44)
P_B = (824, 44, 44, 44, 222)
P_C = (824, 1, 1, 44, 44)


def _relabel_b(a: Apportionment) -> tuple[int, ...]:
    (j,) = [i for i in range(1, 5) if a[i] == 1]
    pops = list(P_B)
    pops[j], pops[4] = pops[4], pops[j]
    return tuple(pops)


def _relabel_c(a: Apportionment) -> tuple[int, ...]:
    held = [i for i in range(1, 5) if a[i] == 1]
    return (824,) + tuple(44 if i in held else 1 for i in range(1, 5))


def verify_theorem1() -> dict:
    """Certificate covering every quota allocation on p^A; ``certified`` is False if any escapes."""
    start = PopulationProfile(P_A)
    cases = []
    escaped = []
    for a in enumerate_quota_allocations(start, HOUSE):
        if a[0] == 9:
            against, pops = "B", _relabel_b(a)
        elif a[0] == 8:
            against, pops = "C", _relabel_c(a)
        else:
            raise AssertionError(f"quota allocation {a.seats} gives state 1 neither 8 nor 9 seats")
        target = PopulationProfile(pops)
        witnesses = []
        for b in enumerate_quota_allocations(target, HOUSE):
            pair = detect_population_paradox((start, HOUSE, a), (target, HOUSE, b))
            witnesses.append({"allocation": list(b.seats), "paradox": None if pair is None else [pair[0] + 1, pair[1] + 1]})
        ok = all(w["paradox"] is not None for w in witnesses)
        if not ok:
            escaped.append(list(a.seats))
        cases.append(
            {
                "allocation": list(a.seats),
                "against": against,
                "profile": list(pops),
                "responses": witnesses,
                "certified": ok,
            }
        )
    return {
        "check": "theorem1",
        "house": HOUSE,
        "profiles": {"A": list(P_A), "B": list(P_B), "C": list(P_C)},
        "cases": cases,
        "count": len(cases),
        "escaped": escaped,
        "certified": not escaped,
    }
