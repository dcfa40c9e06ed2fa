"""Enumeration of quota allocations and quota seat sequences."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from ..core import Apportionment, PopulationProfile, standard_quota

MAX_STATES = 20


@dataclass(frozen=True)
class QuotaAllocationSet:
    profile: PopulationProfile
    house: int
    allocations: tuple[Apportionment, ...]

    def __len__(self):
        return len(self.allocations)

    def __iter__(self):
        return iter(self.allocations)

    def seats(self) -> list[tuple[int, ...]]:
        return [a.seats for a in self.allocations]


def enumerate_quota_allocations(prof: PopulationProfile, h: int) -> QuotaAllocationSet:
    """All apportionments with every a_i in {floor q_i, ceil q_i}, in lexicographic order."""
    if prof.n > MAX_STATES:
        raise ValueError(f"{prof.n} states exceed the enumeration limit {MAX_STATES}")
    quota = standard_quota(prof, h)
    floors = quota.floors()
    fractional = [i for i, q in enumerate(quota.values) if q.denominator != 1]
    extra = h - sum(floors)
    found = []
    for ups in itertools.combinations(fractional, extra):
        seats = list(floors)
        for i in ups:
            seats[i] += 1
        found.append(tuple(seats))
    found.sort()
    return QuotaAllocationSet(prof, h, tuple(Apportionment(s, h) for s in found))


def quota_bounds(prof: PopulationProfile, h: int) -> list[tuple[int, int]]:
    P = prof.total
    out = []
    for p in prof.populations:
        lo, r = divmod(p * h, P)
        out.append((lo, lo + (1 if r else 0)))
    return out


def in_quota(prof: PopulationProfile, h: int, seats) -> bool:
    if h == 0:
        return all(s == 0 for s in seats)
    P = prof.total
    for p, s in zip(prof.populations, seats):
        lo, r = divmod(p * h, P)
        if not lo <= s <= lo + (1 if r else 0):
            return False
    return True


def quota_sequences(prof: PopulationProfile, length: int | None = None):
    """Yield every seat sequence of the given length (default P) that satisfies quota at each prefix."""
    length = prof.total if length is None else length
    seats = [0] * prof.n
    seq: list[int] = []

    def walk():
        h = len(seq)
        if h == length:
            yield tuple(seq)
            return
        for i in range(prof.n):
            seats[i] += 1
            if in_quota(prof, h + 1, seats):
                seq.append(i)
                yield from walk()
                seq.pop()
            seats[i] -= 1

    yield from walk()


def quota_value(prof: PopulationProfile, h: int, i: int) -> Fraction:
    return Fraction(prof[i] * h, prof.total)


def floor_quota(prof: PopulationProfile, h: int, i: int) -> int:
    return math.floor(quota_value(prof, h, i))
