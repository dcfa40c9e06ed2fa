"""Toxic allocations and the pitfall examples for house-monotone methods."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Optional

from ..core import Apportionment, PopulationProfile, check_quota, standard_quota
from .quota import enumerate_quota_allocations, in_quota


def _searchers(prof: PopulationProfile):
    P, n = prof.total, prof.n

    @lru_cache(maxsize=None)
    def down(seats: tuple[int, ...]) -> Optional[tuple[int, ...]]:
        # a quota path from the empty house up to ``seats``, as the states added
        h = sum(seats)
        if h == 0:
            return ()
        for i in range(n):
            if seats[i]:
                prev = seats[:i] + (seats[i] - 1,) + seats[i + 1:]
                if in_quota(prof, h - 1, prev):
                    path = down(prev)
                    if path is not None:
                        return path + (i,)
        return None

    @lru_cache(maxsize=None)
    def up(seats: tuple[int, ...]) -> Optional[tuple[int, ...]]:
        # a quota path from ``seats`` up to house P
        h = sum(seats)
        if h == P:
            return ()
        for i in range(n):
            nxt = seats[:i] + (seats[i] + 1,) + seats[i + 1:]
            if in_quota(prof, h + 1, nxt):
                path = up(nxt)
                if path is not None:
                    return (i,) + path
        return None

    return down, up


def toxicity_witness(prof: PopulationProfile, h: int, a: Apportionment) -> Optional[tuple[int, ...]]:
    """A quota seat sequence of length P passing through ``a`` at h, or None if ``a`` is toxic."""
    if not check_quota(prof, h, a):
        raise ValueError(f"{a.seats} violates quota at house {h}; toxicity concerns quota allocations")
    if h > prof.total:
        raise ValueError("house size exceeds total population")
    down, up = _searchers(prof)
    before = down(a.seats)
    if before is None:
        return None
    after = up(a.seats)
    if after is None:
        return None
    return before + after


def is_toxic(prof: PopulationProfile, h: int, a: Apportionment) -> bool:
    """True iff no house-monotone quota solution can output ``a`` at house size h."""
    return toxicity_witness(prof, h, a) is None


EXAMPLE1 = ((1, 2, 1, 2), 2, (1, 0, 1, 0))

EXAMPLE2_PROFILE = (45, 25, 15, 15)
EXAMPLE2_SUPPORT = {
    (2, 1, 0, 0): Fraction(35, 100),
    (1, 1, 1, 0): Fraction(20, 100),
    (1, 1, 0, 1): Fraction(20, 100),
    (1, 0, 1, 1): Fraction(25, 100),
}

# the three-layer flow network, capacities in percent
FLOW_LAYERS = (
    ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)),
    ((1, 1, 0, 0), (1, 0, 1, 0), (1, 0, 0, 1), (0, 1, 1, 0), (0, 1, 0, 1)),
    ((2, 1, 0, 0), (1, 1, 1, 0), (1, 1, 0, 1), (1, 0, 1, 1)),
)
FLOW_INGRESS = ("45", "25", "15", "15")
FLOW_EGRESS = ("35", "20", "20", "25")
# (from layer, from row, to row, percent); rows are 1-based within a layer
FLOW_EDGES = (
    (1, 1, 1, "20"), (1, 1, 2, "12.5"), (1, 1, 3, "12.5"),
    (1, 2, 1, "20"), (1, 2, 4, "2.5"), (1, 2, 5, "2.5"),
    (1, 3, 2, "12.5"), (1, 3, 4, "2.5"),
    (1, 4, 3, "12.5"), (1, 4, 5, "2.5"),
    (2, 1, 1, "35"), (2, 1, 2, "2.5"), (2, 1, 3, "2.5"),
    (2, 2, 2, "12.5"), (2, 2, 4, "12.5"),
    (2, 3, 3, "12.5"), (2, 3, 4, "12.5"),
    (2, 4, 2, "5"),
    (2, 5, 3, "5"),
)


def _pct(s: str) -> Fraction:
    return Fraction(s) / 100


def check_flow_network() -> list[str]:
    """Direct arithmetic on the fixed network; returns the list of failed checks."""
    prof = PopulationProfile(EXAMPLE2_PROFILE)
    problems = []
    inflow = [[Fraction(0)] * len(layer) for layer in FLOW_LAYERS]
    outflow = [[Fraction(0)] * len(layer) for layer in FLOW_LAYERS]
    for r, cap in enumerate(FLOW_INGRESS):
        inflow[0][r] += _pct(cap)
    for r, cap in enumerate(FLOW_EGRESS):
        outflow[2][r] += _pct(cap)
    for layer, src, dst, cap in FLOW_EDGES:
        a = FLOW_LAYERS[layer - 1][src - 1]
        b = FLOW_LAYERS[layer][dst - 1]
        diff = [y - x for x, y in zip(a, b)]
        if sorted(diff) != [0, 0, 0, 1]:
            problems.append(f"edge {a} -> {b} is not a single added seat")
        outflow[layer - 1][src - 1] += _pct(cap)
        inflow[layer][dst - 1] += _pct(cap)
    if sum(inflow[0]) != 1:
        problems.append(f"ingress totals {sum(inflow[0])}, not 1")
    if sum(outflow[2]) != 1:
        problems.append(f"egress totals {sum(outflow[2])}, not 1")
    for k, layer in enumerate(FLOW_LAYERS):
        h = k + 1
        for r, alloc in enumerate(layer):
            if inflow[k][r] != outflow[k][r]:
                problems.append(f"flow not conserved at {alloc}: in {inflow[k][r]}, out {outflow[k][r]}")
            if not check_quota(prof, h, Apportionment(alloc, h)):
                problems.append(f"{alloc} violates quota at house {h}")
        mean = [sum(inflow[k][r] * alloc[i] for r, alloc in enumerate(layer)) for i in range(prof.n)]
        if tuple(mean) != standard_quota(prof, h).values:
            problems.append(f"layer {h} expected seats {mean} differ from the standard quotas")
    final = {alloc: outflow[2][r] for r, alloc in enumerate(FLOW_LAYERS[2])}
    if final != EXAMPLE2_SUPPORT:
        problems.append("egress does not match the stated house-3 distribution")
    return problems


def monotone_successors(prof: PopulationProfile, h: int, a: tuple[int, ...]) -> list[tuple[int, ...]]:
    """Quota allocations at h + 1 obtained from ``a`` by adding one seat."""
    out = []
    for i in range(prof.n):
        nxt = a[:i] + (a[i] + 1,) + a[i + 1:]
        if in_quota(prof, h + 1, nxt):
            out.append(nxt)
    return out


def verify_example1() -> dict:
    pops, h, alloc = EXAMPLE1
    prof = PopulationProfile(pops)
    toxic = is_toxic(prof, h, Apportionment(alloc, h))
    return {
        "check": "example1",
        "profile": list(pops),
        "house": h,
        "allocation": list(alloc),
        "quota_allocations": [list(s) for s in enumerate_quota_allocations(prof, h).seats()],
        "toxic": toxic,
        "certified": toxic,
    }


def verify_pitfall_example2() -> dict:
    """Certify that the house-3 distribution cannot be extended ex ante proportionally to house 4.

    All quantities are exact rationals.
    """
    prof = PopulationProfile(EXAMPLE2_PROFILE)
    h = 3
    problems = []
    for alloc in EXAMPLE2_SUPPORT:
        if not check_quota(prof, h, Apportionment(alloc, h)):
            problems.append(f"support allocation {alloc} violates quota")
    if sum(EXAMPLE2_SUPPORT.values()) != 1:
        problems.append("support probabilities do not sum to 1")
    expected = [sum(p * a[i] for a, p in EXAMPLE2_SUPPORT.items()) for i in range(prof.n)]
    if tuple(expected) != standard_quota(prof, h).values:
        problems.append("house-3 distribution is not ex ante proportional")

    successors = {a: monotone_successors(prof, h, a) for a in EXAMPLE2_SUPPORT}
    best = sum(p * max(s[0] for s in successors[a]) for a, p in EXAMPLE2_SUPPORT.items())
    q1 = standard_quota(prof, h + 1)[0]
    forced = successors[(1, 0, 1, 1)]
    if forced != [(1, 1, 1, 1)]:
        problems.append(f"successors of (1, 0, 1, 1) are {forced}, expected only (1, 1, 1, 1)")
    if not best < q1:
        problems.append(f"max expected seats of state 1 at house 4 is {best}, not below {q1}")

    toxicity = {}
    for a in EXAMPLE2_SUPPORT:
        witness = toxicity_witness(prof, h, Apportionment(a, h))
        toxicity[a] = witness
        if witness is None:
            problems.append(f"support allocation {a} is toxic")
    flow_problems = check_flow_network()
    problems.extend(flow_problems)

    return {
        "check": "example2",
        "profile": list(EXAMPLE2_PROFILE),
        "house": h,
        "support": [{"allocation": list(a), "probability": f"{p.numerator}/{p.denominator}"} for a, p in EXAMPLE2_SUPPORT.items()],
        "successors": [{"allocation": list(a), "next": [list(s) for s in succ]} for a, succ in successors.items()],
        "max_expected_state1_at_4": f"{best.numerator}/{best.denominator}",
        "quota_state1_at_4": f"{q1.numerator}/{q1.denominator}",
        "non_toxic_witnesses": [
            {"allocation": list(a), "sequence": None if w is None else [i + 1 for i in w]} for a, w in toxicity.items()
        ],
        "flow_network_ok": not flow_problems,
        "problems": problems,
        "certified": not problems,
        "max_expected": best,
    }


def verify_pitfalls() -> dict:
    ex1 = verify_example1()
    ex2 = verify_pitfall_example2()
    ex2 = {k: v for k, v in ex2.items() if k != "max_expected"}
    return {"check": "pitfalls", "example1": ex1, "example2": ex2, "certified": ex1["certified"] and ex2["certified"]}
