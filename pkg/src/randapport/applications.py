"""Repeated sortition of a fixed-size commission and repeated course assignment.

Both run cumulative rounding over T rounds, so every member's (or faculty
member's) running count stays within one of its running entitlement.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .bipartite import BipartiteGraph, WeightedBipartiteInstance
from .core import parse_rational
from .cumulative import audit_outcome, cumulative_round, cumulative_round_batch, star_instance


class InfeasibleConfig(ValueError):
    """A configuration whose rounding instance would have weights above 1."""

    def __init__(self, message: str, hints: Sequence[str] = ()):
        super().__init__(message)
        self.hints = list(hints)

    def __str__(self):
        text = super().__str__()
        if self.hints:
            text += "\n" + "\n".join(f"  hint: {h}" for h in self.hints)
        return text


# --- sortition -------------------------------------------------------------


@dataclass(frozen=True)
class SortitionConfig:
    """Members with positive weights, ``seats`` chosen per round, over ``rounds`` rounds.

    ``weights`` is either one weight per member (constant across rounds) or a
    per-round table ``weights[t][i]``.
    """

    members: tuple[str, ...]
    weights: tuple
    seats: int
    rounds: int

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(str(m) for m in self.members))
        w = self.weights
        if w and isinstance(w[0], (list, tuple)):
            rows = tuple(tuple(parse_rational(x) for x in row) for row in w)
        else:
            rows = tuple(parse_rational(x) for x in w)
        object.__setattr__(self, "weights", rows)

    @property
    def per_round(self) -> bool:
        return bool(self.weights) and isinstance(self.weights[0], tuple)

    def round_weights(self, t: int) -> tuple[Fraction, ...]:
        return self.weights[t] if self.per_round else self.weights

    def normalized(self) -> list[tuple[Fraction, ...]]:
        """Selection probability of each member in each round: k * w_i / sum w."""
        out = []
        for t in range(self.rounds):
            w = self.round_weights(t)
            total = sum(w)
            out.append(tuple(self.seats * x / total for x in w))
        return out

    def validate(self) -> None:
        n = len(self.members)
        if len(set(self.members)) != n:
            raise ValueError("member names must be unique")
        if self.rounds < 1:
            raise ValueError("need at least one round")
        if self.per_round and len(self.weights) != self.rounds:
            raise ValueError(f"{len(self.weights)} weight rows for {self.rounds} rounds")
        for t in range(self.rounds):
            w = self.round_weights(t)
            if len(w) != n:
                raise ValueError(f"round {t + 1}: {len(w)} weights for {n} members")
            if any(x <= 0 for x in w):
                raise ValueError(f"round {t + 1}: weights must be positive")
        if not 1 <= self.seats <= n:
            raise InfeasibleConfig(
                f"cannot select {self.seats} of {n} members",
                ["choose a seat count between 1 and the number of members"],
            )
        for t, row in enumerate(self.normalized()):
            for name, x in zip(self.members, row):
                if x > 1:
                    raise InfeasibleConfig(
                        f"round {t + 1}: member {name} would need selection probability {x} > 1",
                        [
                            f"split {name} into {math.ceil(x)} members sharing its weight",
                            "reduce the weight of the largest members",
                            "raise the number of seats per round",
                        ],
                    )

    def min_probability(self) -> Fraction:
        return min(min(row) for row in self.normalized())


def window_bound(w_min) -> int:
    """Rounds within which a member of selection probability >= w_min is always picked."""
    w_min = parse_rational(w_min)
    if not 0 < w_min <= 1:
        raise ValueError("w_min must lie in (0, 1]")
    return math.ceil(2 / w_min)


def sortition_instance(config: SortitionConfig) -> WeightedBipartiteInstance:
    return star_instance(config.normalized(), config.members, center="commission")


@dataclass
class SortitionResult:
    config: SortitionConfig
    seed: int
    selected: list[list[str]]
    bits: np.ndarray  # (rounds, members)
    audit: dict

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["round"] + [f"seat_{j + 1}" for j in range(self.config.seats)])
        for t, names in enumerate(self.selected, start=1):
            writer.writerow([t] + names)
        return buf.getvalue()


def longest_unselected_runs(bits: np.ndarray) -> list[int]:
    """Per member, the longest stretch of consecutive rounds without selection."""
    out = []
    for col in bits.T:
        best = run = 0
        for x in col:
            run = 0 if x else run + 1
            best = max(best, run)
        out.append(best)
    return out


def audit_sortition(config: SortitionConfig, bits: np.ndarray) -> dict:
    problems = []
    norm = config.normalized()
    for t, row in enumerate(bits, start=1):
        if int(row.sum()) != config.seats:
            problems.append(f"round {t}: {int(row.sum())} selected, expected {config.seats}")
    running = np.cumsum(bits, axis=0)
    for i, name in enumerate(config.members):
        S = Fraction(0)
        for t in range(config.rounds):
            S += norm[t][i]
            if not math.floor(S) <= running[t, i] <= math.ceil(S):
                problems.append(f"{name}: {running[t, i]} selections after {t + 1} rounds, entitlement {S}")
    w_min = config.min_probability()
    bound = window_bound(w_min)
    runs = longest_unselected_runs(bits)
    for name, r in zip(config.members, runs):
        if r >= bound:
            problems.append(f"{name} went {r} consecutive rounds unselected; bound is fewer than {bound}")
    return {
        "rounds": config.rounds,
        "seats": config.seats,
        "w_min": f"{w_min.numerator}/{w_min.denominator}",
        "window": bound,
        "max_gap": {name: r for name, r in zip(config.members, runs)},
        "selections": {name: int(running[-1, i]) for i, name in enumerate(config.members)},
        "violations": problems,
        "passed": not problems,
    }


def run_sortition(config: SortitionConfig, seed: int) -> SortitionResult:
    config.validate()
    inst = sortition_instance(config)
    outcome = cumulative_round(inst, seed)
    violations = audit_outcome(inst, outcome)
    bits = outcome.bits  # (rounds, members): star edges are in member order
    selected = [[config.members[i] for i in np.flatnonzero(row)] for row in bits]
    audit = audit_sortition(config, bits)
    audit["violations"] = violations + audit["violations"]
    audit["passed"] = not audit["violations"]
    return SortitionResult(config, seed, selected, bits, audit)


def sortition_from_json(data: dict, rounds: Optional[int] = None) -> SortitionConfig:
    try:
        members = [m["name"] for m in data["members"]]
        weights = [m["weight"] for m in data["members"]]
        seats = int(data["seats"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed sortition config: {exc}") from exc
    T = rounds if rounds is not None else int(data.get("rounds", 1))
    if "round_weights" in data:
        weights = data["round_weights"]
    return SortitionConfig(tuple(members), tuple(weights), seats, T)


# --- course assignment -----------------------------------------------------


@dataclass(frozen=True)
class AssignmentConfig:
    """Weights ``weights[(faculty, course)]`` in [0, 1], constant over ``semesters``."""

    faculty: tuple[str, ...]
    courses: tuple[str, ...]
    weights: tuple[tuple[str, str, Fraction], ...]
    semesters: int

    def __post_init__(self):
        object.__setattr__(self, "faculty", tuple(str(x) for x in self.faculty))
        object.__setattr__(self, "courses", tuple(str(x) for x in self.courses))
        object.__setattr__(
            self, "weights", tuple((str(a), str(b), parse_rational(w)) for a, b, w in self.weights)
        )

    def course_load(self) -> dict[str, Fraction]:
        out = {b: Fraction(0) for b in self.courses}
        for _, b, w in self.weights:
            out[b] += w
        return out

    def faculty_load(self) -> dict[str, Fraction]:
        out = {a: Fraction(0) for a in self.faculty}
        for a, _, w in self.weights:
            out[a] += w
        return out

    def validate(self) -> None:
        if self.semesters < 1:
            raise ValueError("need at least one semester")
        for a, b, w in self.weights:
            if not 0 <= w <= 1:
                raise InfeasibleConfig(
                    f"weight of ({a}, {b}) is {w}, outside [0, 1]",
                    ["weights are per-semester teaching probabilities and must lie in [0, 1]"],
                )
        for b, d in self.course_load().items():
            if d > 1:
                raise InfeasibleConfig(
                    f"course {b} has total weight {d} > 1, so it would be taught twice in a semester",
                    [f"lower the weights on {b} so they sum to at most 1", f"split {b} into separate sections"],
                )

    def instance(self) -> WeightedBipartiteInstance:
        edges = tuple((a, b) for a, b, _ in self.weights)
        graph = BipartiteGraph(self.faculty, self.courses, edges)
        row = tuple(w for _, _, w in self.weights)
        return WeightedBipartiteInstance(graph, (row,) * self.semesters)


@dataclass
class AssignmentResult:
    config: AssignmentConfig
    seed: int
    schedule: list[list[tuple[str, str]]]
    bits: np.ndarray
    audit: dict

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["semester", "faculty", "course"])
        for t, pairs in enumerate(self.schedule, start=1):
            for a, b in pairs:
                writer.writerow([t, a, b])
        return buf.getvalue()


def audit_assignment(config: AssignmentConfig, bits: np.ndarray) -> dict:
    inst = config.instance()
    g = inst.graph
    D = bits.astype(np.int64) @ g.incidence  # (T, V)
    running = np.cumsum(D, axis=0)
    loads = {**config.faculty_load(), **config.course_load()}
    problems = []
    exact = []
    for j, v in enumerate(g.nodes):
        d = loads[v]
        for t in range(config.semesters):
            if v in config.courses and D[t, j] > 1:
                problems.append(f"course {v} taught {D[t, j]} times in semester {t + 1}")
            if not math.floor(d) <= D[t, j] <= math.ceil(d):
                problems.append(f"{v}: load {D[t, j]} in semester {t + 1}, fractional {d}")
            S = d * (t + 1)
            if not math.floor(S) <= running[t, j] <= math.ceil(S):
                problems.append(f"{v}: {running[t, j]} after {t + 1} semesters, entitlement {S}")
            if S.denominator == 1:
                exact.append((v, t + 1, int(S)))
    # per academic year (semesters 2k-1, 2k) when twice the load is whole
    yearly = {}
    for j, v in enumerate(g.nodes):
        d2 = 2 * loads[v]
        if d2.denominator == 1 and config.semesters >= 2:
            counts = [int(D[t, j] + D[t + 1, j]) for t in range(0, config.semesters - 1, 2)]
            yearly[v] = counts
            if any(c != d2 for c in counts):
                problems.append(f"{v}: yearly counts {counts}, expected {int(d2)} each year")
    return {
        "semesters": config.semesters,
        "loads": {v: f"{loads[v].numerator}/{loads[v].denominator}" for v in g.nodes},
        "per_year": yearly,
        "exact_prefixes": len(exact),
        "violations": problems,
        "passed": not problems,
    }


def run_assignment(config: AssignmentConfig, seed: int) -> AssignmentResult:
    config.validate()
    inst = config.instance()
    outcome = cumulative_round(inst, seed)
    violations = audit_outcome(inst, outcome)
    g = inst.graph
    schedule = [[g.edges[k] for k in np.flatnonzero(row)] for row in outcome.bits]
    audit = audit_assignment(config, outcome.bits)
    audit["violations"] = violations + audit["violations"]
    audit["passed"] = not audit["violations"]
    return AssignmentResult(config, seed, schedule, outcome.bits, audit)


def assignment_from_json(data: dict, semesters: Optional[int] = None) -> AssignmentConfig:
    try:
        faculty = data["faculty"]
        courses = data["courses"]
        weights = [(w["faculty"], w["course"], w["weight"]) for w in data["weights"]]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed assignment config: {exc}") from exc
    T = semesters if semesters is not None else int(data.get("semesters", 1))
    return AssignmentConfig(tuple(faculty), tuple(courses), tuple(weights), T)


def sortition_batch(config: SortitionConfig, seeds: Sequence[int]) -> np.ndarray:
    """Selection bits (M, rounds, members) for many seeds; run m equals ``run_sortition(config, seeds[m])``."""
    config.validate()
    return cumulative_round_batch(sortition_instance(config), seeds)


def batch_window_violations(config: SortitionConfig, bits: np.ndarray) -> int:
    """Number of runs in which some member goes ``window_bound(w_min)`` rounds unselected."""
    W = window_bound(config.min_probability())
    M, T, n = bits.shape
    if T < W:
        return 0
    running = np.concatenate([np.zeros((M, 1, n), dtype=np.int64), np.cumsum(bits, axis=1, dtype=np.int64)], axis=1)
    windows = running[:, W:, :] - running[:, :-W, :]
    return int(np.count_nonzero(np.any(windows == 0, axis=(1, 2))))
