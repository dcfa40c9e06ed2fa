"""Apportionment methods.

Deterministic: Hamilton (largest remainders) and divisor methods such as
Huntington-Hill. Randomized: Grimmett's systematic method, the Poisson-arrival
method (population monotone, ex ante proportional) and the cumulative-rounding
method (house monotone, quota, ex ante proportional).

Ties are broken by lower state index everywhere.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .core import (
    Apportionment,
    PopulationProfile,
    SeatSequence,
    check_sequence_quota,
    seat_sequence_prefix_allocation,
    standard_quota,
)
from .bipartite import integer_weights
from .cumulative import (
    PartialRounding,
    LayeredGraph,
    build_layered_graph,
    cumulative_round_batch,
    star_instance,
)
from .rng import Stream, label_digest, stream_key, stream_keys


def hamilton(prof: PopulationProfile, h: int) -> Apportionment:
    quota = standard_quota(prof, h)
    seats = list(quota.floors())
    left = h - sum(seats)
    order = sorted(range(prof.n), key=lambda i: (-(quota[i] - seats[i]), i))
    for i in order[:left]:
        seats[i] += 1
    return Apportionment(tuple(seats), h)


@dataclass(frozen=True)
class DivisorCriterion:
    """Divisor criterion d with t <= d(t) <= t + 1.

    ``square`` optionally gives d(t)**2 as an exact rational, letting values
    p / d(t) be compared exactly through p**2 / d(t)**2.
    """

    name: str
    value: Callable[[int], float]
    square: Optional[Callable[[int], Fraction]] = None

    def check(self, upto: int) -> None:
        prev = -math.inf
        for t in range(upto + 1):
            if self.square is not None:
                sq = self.square(t)
                ok = t * t <= sq <= (t + 1) ** 2
                d = math.sqrt(sq)
            else:
                d = self.value(t)
                ok = t <= d <= t + 1
            if not ok or d < prev:
                raise ValueError(f"invalid divisor criterion {self.name}: d({t}) = {d}")
            prev = d


HUNTINGTON_HILL = DivisorCriterion(
    "huntington-hill", lambda t: math.sqrt(t * (t + 1)), lambda t: Fraction(t * (t + 1))
)
JEFFERSON = DivisorCriterion("jefferson", lambda t: t + 1, lambda t: Fraction((t + 1) ** 2))
WEBSTER = DivisorCriterion("webster", lambda t: t + 0.5, lambda t: Fraction(2 * t + 1, 2) ** 2)
ADAMS = DivisorCriterion("adams", lambda t: t, lambda t: Fraction(t * t))


class _Priority:
    """Sort key for p / d(t); larger values first, ties by (state, t)."""

    __slots__ = ("key",)

    def __init__(self, p: int, t: int, state: int, crit: DivisorCriterion):
        if crit.square is not None:
            sq = crit.square(t)
            # zero divisor: infinite value, ordered by population then index
            value = (1, p, 0) if sq == 0 else (0, Fraction(p * p) / sq, 0)
        else:
            d = crit.value(t)
            value = (1, p, 0) if d == 0 else (0, p / d, 0)
        self.key = (value, -state, -t)

    def __lt__(self, other):
        return self.key > other.key


def divisor(prof: PopulationProfile, h: int, criterion: DivisorCriterion = HUNTINGTON_HILL) -> Apportionment:
    """Give seats to the h largest values p_i / d(t) over all states i and t >= 0."""
    if h < 1:
        raise ValueError("house size must be positive")
    criterion.check(h)
    heap = [(_Priority(p, 0, i, criterion), i) for i, p in enumerate(prof.populations)]
    heapq.heapify(heap)
    seats = [0] * prof.n
    for _ in range(h):
        _, i = heapq.heappop(heap)
        seats[i] += 1
        heapq.heappush(heap, (_Priority(prof[i], seats[i], i, criterion), i))
    return Apportionment(tuple(seats), h)


def huntington_hill(prof: PopulationProfile, h: int) -> Apportionment:
    return divisor(prof, h, HUNTINGTON_HILL)


def grimmett_with(prof: PopulationProfile, h: int, permutation: Sequence[int], U) -> Apportionment:
    """Systematic sampling along a permuted order of states.

    ``permutation`` lists the states in the order they are laid out; state
    ``permutation[k]`` receives the integers in [Q_{k-1}, Q_k) where
    Q_k = U + (sum of the first k+1 laid-out quotas).
    """
    U = Fraction(U) if not isinstance(U, str) else Fraction(U)
    if not 0 <= U < 1:
        raise ValueError("U must lie in [0, 1)")
    if sorted(permutation) != list(range(prof.n)):
        raise ValueError("not a permutation of the states")
    quota = standard_quota(prof, h)
    seats = [0] * prof.n
    lo = U
    for i in permutation:
        hi = lo + quota[i]
        # integers k with lo <= k < hi
        seats[i] = math.ceil(hi) - math.ceil(lo)
        lo = hi
    return Apportionment(tuple(seats), h)


def grimmett(prof: PopulationProfile, h: int, seed: int) -> Apportionment:
    stream = Stream(stream_key(seed, "grimmett"))
    perm = stream.permutation(prof.n)
    U = stream.uniform_fraction()
    return grimmett_with(prof, h, perm, U)


class ArrivalStream:
    """Arrival times of a unit-rate Poisson process, generated on demand.

    Depends only on (seed, state); the prefix never changes as it grows.
    """

    def __init__(self, seed: int, state: int):
        self._stream = Stream(stream_key(seed, "poisson", state))
        self._times: list[float] = []

    def __getitem__(self, k: int) -> float:
        """0-based k-th arrival time."""
        while len(self._times) <= k:
            last = self._times[-1] if self._times else 0.0
            self._times.append(last + self._stream.exponential())
        return self._times[k]

    def __len__(self):
        return len(self._times)


class FixedArrivals:
    """Hand-specified arrival times, for tests and worked examples."""

    def __init__(self, times: Sequence[float]):
        times = list(times)
        if any(b <= a for a, b in zip(times, times[1:])) or (times and times[0] <= 0):
            raise ValueError("arrival times must be positive and strictly increasing")
        self._times = times

    def __getitem__(self, k: int) -> float:
        if k >= len(self._times):
            raise IndexError("fixed arrival stream exhausted")
        return self._times[k]


def poisson_with(prof: PopulationProfile, h: int, streams: Sequence) -> Apportionment:
    """Seats = how many of the h smallest scaled arrivals x / p_i belong to each state.

    Streams are read lazily: a state's next arrival is only generated once all
    smaller merged values have been taken.
    """
    if h < 1:
        raise ValueError("house size must be positive")
    if len(streams) != prof.n:
        raise ValueError("need one arrival stream per state")
    heap = [(streams[i][0] / p, i) for i, p in enumerate(prof.populations)]
    heapq.heapify(heap)
    seats = [0] * prof.n
    for k in range(h):
        _, i = heapq.heappop(heap)
        seats[i] += 1
        if k + 1 < h:
            heapq.heappush(heap, (streams[i][seats[i]] / prof[i], i))
    return Apportionment(tuple(seats), h)


class PoissonMethod:
    """Population-monotone method; one instance fixes the random outcome."""

    def __init__(self, seed: int):
        self.seed = seed
        self._streams: dict[int, ArrivalStream] = {}

    def stream(self, i: int) -> ArrivalStream:
        if i not in self._streams:
            self._streams[i] = ArrivalStream(self.seed, i)
        return self._streams[i]

    def __call__(self, prof: PopulationProfile, h: int) -> Apportionment:
        return poisson_with(prof, h, [self.stream(i) for i in range(prof.n)])


def poisson_method(prof: PopulationProfile, h: int, seed: int) -> Apportionment:
    return PoissonMethod(seed)(prof, h)


def poisson_batch(prof: PopulationProfile, h: int, seeds: Sequence[int]) -> np.ndarray:
    """Seat matrix (M, n) for many seeds, vectorised over seeds.

    Uses the same arrival streams as :func:`poisson_method`: only the first h
    arrivals of each state can be among the h smallest merged values.
    """
    seeds = np.asarray(seeds, dtype=np.uint64)
    M, n = len(seeds), prof.n
    scaled = np.empty((M, n * h))
    for i, p in enumerate(prof.populations):
        keys = stream_keys(seeds, "poisson", i)
        idx = np.arange(1, h + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = keys[:, None] + idx[None, :] * np.uint64(0x9E3779B97F4A7C15)
            z ^= z >> np.uint64(30)
            z *= np.uint64(0xBF58476D1CE4E5B9)
            z ^= z >> np.uint64(27)
            z *= np.uint64(0x94D049BB133111EB)
            z ^= z >> np.uint64(31)
        u = ((z >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
        times = np.cumsum(-np.log1p(-u), axis=1)
        scaled[:, i * h:(i + 1) * h] = times / p
    # stable order: ties fall to the lower state index, as in the heap merge
    order = np.argsort(scaled, axis=1, kind="stable")[:, :h]
    owner = order // h
    return np.stack([(owner == i).sum(axis=1) for i in range(n)], axis=1)


# --- house-monotone method via cumulative rounding -------------------------


def profile_digest(prof: PopulationProfile) -> int:
    return label_digest("profile", prof.populations)


def star_for_profile(prof: PopulationProfile, T: Optional[int] = None):
    """Star with leaf weights p_i / P repeated for T steps (default T = P)."""
    P = prof.total
    T = P if T is None else T
    row = tuple(Fraction(p, P) for p in prof.populations)
    names = [f"s{i}" for i in range(prof.n)]
    return star_instance([row] * T, names)


def decode_seat_sequence(bits: np.ndarray) -> list[int]:
    """Map star bits (T, n) to the state picked at each step."""
    entries = []
    for t, row in enumerate(bits):
        up = np.flatnonzero(row)
        if len(up) != 1:
            raise AssertionError(f"step {t + 1}: {len(up)} leaves rounded up, expected exactly 1")
        entries.append(int(up[0]))
    return entries


def sequence_key(prof: PopulationProfile, seed: int) -> int:
    return stream_key(seed, "house-monotone", profile_digest(prof))


def sample_finite_seat_sequence(
    prof: PopulationProfile, seed: int, layered: Optional[LayeredGraph] = None, length: Optional[int] = None
) -> SeatSequence:
    """A quota-satisfying seat sequence of length P (or ``length``) for one profile.

    Position-wise, state i appears with probability p_i / P.
    """
    inst = star_for_profile(prof, length)
    lg = layered if layered is not None else build_layered_graph(inst)
    bits = cumulative_round_batch(inst, [], layered=lg, keys=np.array([sequence_key(prof, seed)], dtype=np.uint64))[0]
    entries = decode_seat_sequence(bits)
    seq = SeatSequence(tuple(entries), prof.n)
    if not check_sequence_quota(prof, seq, len(entries)):
        raise AssertionError("sampled seat sequence violates quota")
    return seq


def seat_sequence_batch(prof: PopulationProfile, seeds: Sequence[int], length: Optional[int] = None) -> np.ndarray:
    """Seat sequences for many seeds: int array (M, length)."""
    inst = star_for_profile(prof, length)
    lg = build_layered_graph(inst)
    keys = stream_keys(seeds, "house-monotone", profile_digest(prof))
    bits = cumulative_round_batch(inst, [], layered=lg, keys=keys)
    counts = bits.sum(axis=2)
    if np.any(counts != 1):
        raise AssertionError("a step rounded up other than exactly one leaf")
    return bits.argmax(axis=2)


class HouseMonotoneMethod:
    """House monotone, quota-satisfying, ex ante proportional method.

    A fixed seed fixes one seat sequence per profile (cached), so answers for
    different house sizes are mutually consistent. With ``h_max`` set, only
    h_max steps are rounded and house sizes above h_max are refused.
    """

    def __init__(self, seed: int, h_max: Optional[int] = None):
        if h_max is not None and h_max < 1:
            raise ValueError("h_max must be positive")
        self.seed = seed
        self.h_max = h_max
        self._cache: dict[tuple[int, ...], SeatSequence] = {}

    def sequence(self, prof: PopulationProfile) -> SeatSequence:
        seq = self._cache.get(prof.populations)
        if seq is None:
            if self.h_max is None:
                block = sample_finite_seat_sequence(prof, self.seed)
                seq = SeatSequence(block.entries, prof.n, cyclic=True)
            else:
                seq = sample_finite_seat_sequence(prof, self.seed, length=self.h_max)
            self._cache[prof.populations] = seq
        return seq

    def __call__(self, prof: PopulationProfile, h: int) -> Apportionment:
        if self.h_max is not None and h > self.h_max:
            raise ValueError(f"house size {h} exceeds h_max = {self.h_max}")
        return seat_sequence_prefix_allocation(self.sequence(prof), h)

    def clone(self) -> "HouseMonotoneMethod":
        return HouseMonotoneMethod(self.seed, self.h_max)


def house_monotone_method(prof: PopulationProfile, h: int, seed: int, h_max: Optional[int] = None) -> Apportionment:
    return HouseMonotoneMethod(seed, h_max)(prof, h)


def cumulative_star_outcome(prof: PopulationProfile, seed: int):
    """Full rounding outcome behind :func:`sample_finite_seat_sequence`, for audits."""
    inst = star_for_profile(prof)
    lg = build_layered_graph(inst)
    w, L = integer_weights(lg.instance)
    state = PartialRounding(lg, w, L, sequence_key(prof, seed), 0, seed).resume()
    return inst, state.outcome()


METHODS = {
    "hamilton": "deterministic",
    "huntington-hill": "deterministic",
    "grimmett": "randomized",
    "poisson": "randomized",
    "cumulative": "randomized",
}
