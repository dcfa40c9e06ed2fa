"""Population profiles, apportionments, seat sequences and the exact axiom checks.

States are 0-based indices. All quota arithmetic uses :class:`fractions.Fraction`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

Rational = Fraction


def parse_rational(value) -> Fraction:
    """Parse an int, Fraction, or a decimal / ``"num/den"`` string exactly.

    Floats are refused: a binary float would carry its representation error
    into every floor computed downstream.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational number: {value!r}") from exc
    raise TypeError(f"expected int, Fraction or string, got {type(value).__name__}")


def format_rational(q: Fraction) -> str:
    """Canonical ``"num/den"`` form (always with a denominator)."""
    return f"{q.numerator}/{q.denominator}"


def floor_ceil(q: Fraction) -> tuple[int, int]:
    return math.floor(q), math.ceil(q)


@dataclass(frozen=True)
class PopulationProfile:
    populations: tuple[int, ...]

    def __post_init__(self):
        pops = tuple(self.populations)
        if len(pops) < 2:
            raise ValueError("a profile needs at least 2 states")
        for p in pops:
            if isinstance(p, bool) or not isinstance(p, int) or p < 1:
                raise ValueError(f"populations must be positive integers, got {p!r}")
        object.__setattr__(self, "populations", pops)

    @property
    def n(self) -> int:
        return len(self.populations)

    @property
    def total(self) -> int:
        return sum(self.populations)

    def __len__(self):
        return len(self.populations)

    def __getitem__(self, i):
        return self.populations[i]


def profile(*populations: int) -> PopulationProfile:
    if len(populations) == 1 and not isinstance(populations[0], int):
        populations = tuple(populations[0])
    return PopulationProfile(tuple(populations))


@dataclass(frozen=True)
class Apportionment:
    seats: tuple[int, ...]
    house: int

    def __post_init__(self):
        seats = tuple(int(a) for a in self.seats)
        if any(a < 0 for a in seats):
            raise ValueError("seat counts must be non-negative")
        if self.house < 1:
            raise ValueError("house size must be positive")
        if sum(seats) != self.house:
            raise ValueError(f"seats {seats} do not sum to house size {self.house}")
        object.__setattr__(self, "seats", seats)

    @classmethod
    def of(cls, seats: Sequence[int]) -> "Apportionment":
        seats = tuple(seats)
        return cls(seats, sum(seats))

    def __len__(self):
        return len(self.seats)

    def __getitem__(self, i):
        return self.seats[i]


@dataclass(frozen=True)
class StandardQuota:
    values: tuple[Fraction, ...]

    @property
    def house(self) -> int:
        total = sum(self.values)
        assert total.denominator == 1
        return int(total)

    def floors(self) -> tuple[int, ...]:
        return tuple(math.floor(q) for q in self.values)

    def ceilings(self) -> tuple[int, ...]:
        return tuple(math.ceil(q) for q in self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __len__(self):
        return len(self.values)


def standard_quota(prof: PopulationProfile, h: int) -> StandardQuota:
    if h < 1:
        raise ValueError("house size must be positive")
    P = prof.total
    return StandardQuota(tuple(Fraction(p * h, P) for p in prof.populations))


def _same_dimension(prof: PopulationProfile, a: Apportionment) -> None:
    if len(a) != prof.n:
        raise ValueError(f"apportionment has {len(a)} states, profile has {prof.n}")


def check_quota(prof: PopulationProfile, h: int, a: Apportionment) -> bool:
    _same_dimension(prof, a)
    if a.house != h:
        raise ValueError(f"apportionment is for house {a.house}, not {h}")
    quota = standard_quota(prof, h)
    return all(math.floor(q) <= s <= math.ceil(q) for q, s in zip(quota.values, a.seats))


def detect_population_paradox(
    first: tuple[PopulationProfile, int, Apportionment],
    second: tuple[PopulationProfile, int, Apportionment],
) -> Optional[tuple[int, int]]:
    """Find states (i, j) where i weakly grew yet lost seats and j weakly shrank yet gained.

    Populations and seats of ``second`` are the primed quantities. Returns the
    lexicographically smallest such pair, or None.
    """
    p, _, a = first
    q, _, b = second
    _same_dimension(p, a)
    _same_dimension(q, b)
    if p.n != q.n:
        raise ValueError("profiles cover different state sets")
    losers = [i for i in range(p.n) if q[i] >= p[i] and b[i] < a[i]]
    gainers = [j for j in range(p.n) if q[j] <= p[j] and b[j] > a[j]]
    for i in losers:
        for j in gainers:
            if i != j:
                return i, j
    return None


def check_house_monotone_step(
    prof: PopulationProfile, h: int, a_h: Apportionment, a_next: Apportionment
) -> bool:
    _same_dimension(prof, a_h)
    _same_dimension(prof, a_next)
    if a_h.house != h or a_next.house != h + 1:
        raise ValueError("expected apportionments for house sizes h and h + 1")
    return all(x <= y for x, y in zip(a_h.seats, a_next.seats))


@dataclass(frozen=True)
class SeatSequence:
    """Seat recipients in order of allocation.

    With ``cyclic=True`` the entries form one block that repeats forever, which
    is how an infinite quota sequence is obtained from a finite one.
    """

    entries: tuple[int, ...]
    n: int
    cyclic: bool = False

    def __post_init__(self):
        entries = tuple(int(x) for x in self.entries)
        if self.n < 2:
            raise ValueError("need at least 2 states")
        if any(not 0 <= x < self.n for x in entries):
            raise ValueError("sequence entry outside the state range")
        if self.cyclic and not entries:
            raise ValueError("a cyclic sequence needs a non-empty block")
        object.__setattr__(self, "entries", entries)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, k: int) -> int:
        """0-based position ``k``."""
        if self.cyclic:
            return self.entries[k % len(self.entries)]
        return self.entries[k]

    def prefix(self, h: int) -> tuple[int, ...]:
        if h > len(self.entries) and not self.cyclic:
            raise ValueError(f"finite sequence of length {len(self.entries)} cannot serve house {h}")
        return tuple(self[k] for k in range(h))


def seat_sequence_prefix_allocation(s: SeatSequence, h: int) -> Apportionment:
    if h < 1:
        raise ValueError("house size must be positive")
    counts = [0] * s.n
    if s.cyclic:
        block = len(s.entries)
        full, rest = divmod(h, block)
        for x in s.entries:
            counts[x] += full
        for x in s.entries[:rest]:
            counts[x] += 1
    else:
        for x in s.prefix(h):
            counts[x] += 1
    return Apportionment(tuple(counts), h)


def check_sequence_quota(prof: PopulationProfile, s: SeatSequence, up_to: int) -> bool:
    if up_to < 1:
        raise ValueError("up_to must be positive")
    if s.n != prof.n:
        raise ValueError("sequence and profile cover different state sets")
    if up_to > len(s.entries) and not s.cyclic:
        raise ValueError(f"finite sequence of length {len(s.entries)} cannot serve house {up_to}")
    P = prof.total
    counts = [0] * prof.n
    for h in range(1, up_to + 1):
        counts[s[h - 1]] += 1
        for i, p in enumerate(prof.populations):
            lo, r = divmod(p * h, P)
            if not (lo <= counts[i] <= lo + (1 if r else 0)):
                return False
    return True
