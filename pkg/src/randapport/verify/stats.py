"""Statistical checks at a z = 4 band, plus an exact negative-correlation check."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from ..bipartite import WeightedBipartiteInstance, validate
from ..core import PopulationProfile, standard_quota
from ..cumulative import build_layered_graph, cumulative_round_batch
from ..dependent import exact_distribution
from ..rng import check_seed, mix64

Z = 4.0
MIN_SAMPLES = 1000


@dataclass
class StatReport:
    """Estimates against targets; a check passes when within ``z`` standard errors."""

    labels: list[str]
    estimates: list[float]
    targets: list[float]
    std_errors: list[float]
    one_sided: bool
    samples: int
    seed: int
    z: float = Z
    passes: list[bool] = field(default_factory=list)

    def __post_init__(self):
        if not self.passes:
            self.passes = [self._ok(e, t, s) for e, t, s in zip(self.estimates, self.targets, self.std_errors)]

    def _ok(self, est: float, target: float, se: float) -> bool:
        slack = self.z * se + 1e-12
        if self.one_sided:
            return est - target <= slack
        return abs(est - target) <= slack

    @property
    def passed(self) -> bool:
        return all(self.passes)

    def failures(self) -> list[str]:
        return [
            f"{lab}: estimate {e:.6f} vs target {t:.6f} (se {s:.2e})"
            for lab, e, t, s, ok in zip(self.labels, self.estimates, self.targets, self.std_errors, self.passes)
            if not ok
        ]

    def to_json(self) -> dict:
        return {
            "samples": self.samples,
            "seed": self.seed,
            "z": self.z,
            "one_sided": self.one_sided,
            "passed": self.passed,
            "checks": [
                {"label": lab, "estimate": e, "target": t, "std_error": s, "pass": ok}
                for lab, e, t, s, ok in zip(self.labels, self.estimates, self.targets, self.std_errors, self.passes)
            ],
        }


def derived_seeds(seed: int, M: int) -> np.ndarray:
    """M distinct 64-bit seeds derived from one master seed."""
    base = mix64(check_seed(seed))
    return (np.uint64(base) + np.arange(M, dtype=np.uint64)).astype(np.uint64)


def _check_m(M: int) -> None:
    if M < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {M}")


def stat_marginals(
    sampler: Callable[[np.ndarray], np.ndarray],
    targets: Sequence,
    M: int,
    seed: int,
    labels: Optional[Sequence[str]] = None,
) -> StatReport:
    """Compare column means of ``sampler(seeds)`` (shape (M, k)) with ``targets``.

    For 0/1 columns the standard error uses the target's Bernoulli variance;
    otherwise the sample variance.
    """
    _check_m(M)
    seeds = derived_seeds(seed, M)
    values = np.asarray(sampler(seeds), dtype=np.float64).reshape(M, -1)
    targets = [float(t) for t in targets]
    if values.shape[1] != len(targets):
        raise ValueError(f"sampler gave {values.shape[1]} columns for {len(targets)} targets")
    binary = np.all((values == 0) | (values == 1), axis=0)
    means = values.mean(axis=0)
    ses = []
    for k, t in enumerate(targets):
        if binary[k] and 0 <= t <= 1:
            ses.append(math.sqrt(t * (1 - t) / M))
        else:
            ses.append(float(values[:, k].std(ddof=1) / math.sqrt(M)))
    labels = list(labels) if labels is not None else [f"x{k}" for k in range(len(targets))]
    return StatReport(labels, [float(m) for m in means], targets, ses, False, M, seed)


def rounding_sampler(instance: WeightedBipartiteInstance):
    """Sampler returning flattened bits (M, T * E) of cumulative rounding."""
    lg = build_layered_graph(instance)

    def sample(seeds: np.ndarray) -> np.ndarray:
        bits = cumulative_round_batch(instance, seeds, layered=lg)
        return bits.reshape(len(seeds), -1)

    return sample


def edge_labels(instance: WeightedBipartiteInstance) -> list[str]:
    return [f"X[{a},{b}]^{t + 1}" for t in range(instance.T) for a, b in instance.graph.edges]


def stat_rounding_marginals(instance: WeightedBipartiteInstance, M: int, seed: int) -> StatReport:
    targets = [w for row in instance.weights for w in row]
    return stat_marginals(rounding_sampler(instance), targets, M, seed, edge_labels(instance))


def negcorr_subsets(instance: WeightedBipartiteInstance, max_size: int = 3):
    """(node, step, edge subset) triples with 2 <= |S| <= max_size, S incident to the node."""
    g = instance.graph
    for t in range(instance.T):
        for v in g.nodes:
            inc = g.incident_edges(v)
            for size in range(2, min(max_size, len(inc)) + 1):
                for S in itertools.combinations(inc, size):
                    yield v, t, S


def stat_negcorr(instance: WeightedBipartiteInstance, M: int, seed: int, max_size: int = 3) -> StatReport:
    """One-sided test of P[all up] <= prod w and P[all down] <= prod (1 - w).

    The band is 4 * sqrt(1 / (4M)), the worst-case Bernoulli standard error.
    """
    _check_m(M)
    validate(instance)
    seeds = derived_seeds(seed, M)
    bits = cumulative_round_batch(instance, seeds)  # (M, T, E)
    se = math.sqrt(1 / (4 * M))
    labels, est, tgt = [], [], []
    for v, t, S in negcorr_subsets(instance, max_size):
        cols = bits[:, t, list(S)]
        w = [instance.weights[t][e] for e in S]
        up = float(np.mean(np.all(cols == 1, axis=1)))
        down = float(np.mean(np.all(cols == 0, axis=1)))
        names = ",".join(f"{instance.graph.edges[e][0]}-{instance.graph.edges[e][1]}" for e in S)
        labels += [f"up {v} t={t + 1} [{names}]", f"down {v} t={t + 1} [{names}]"]
        est += [up, down]
        tgt += [float(math.prod(w)), float(math.prod(1 - x for x in w))]
    return StatReport(labels, est, tgt, [se] * len(est), True, M, seed)


def exact_negcorr(instance: WeightedBipartiteInstance, max_fractional: int = 12, max_size: Optional[int] = None) -> list[str]:
    """Check marginals and negative correlation exactly on the full outcome distribution.

    T = 1 only. Returns the violated inequalities (empty when all hold).
    """
    dist = exact_distribution(instance, max_fractional)
    w = instance.weights[0]
    problems = []
    total = sum(dist.values(), Fraction(0))
    if total != 1:
        problems.append(f"probabilities sum to {total}")
    for e, x in enumerate(w):
        m = sum((p for out, p in dist.items() if out[e]), Fraction(0))
        if m != x:
            problems.append(f"edge {instance.graph.edges[e]}: marginal {m} != weight {x}")
    g = instance.graph
    for v in g.nodes:
        inc = g.incident_edges(v)
        top = len(inc) if max_size is None else min(max_size, len(inc))
        for size in range(2, top + 1):
            for S in itertools.combinations(inc, size):
                up = sum((p for out, p in dist.items() if all(out[e] for e in S)), Fraction(0))
                down = sum((p for out, p in dist.items() if not any(out[e] for e in S)), Fraction(0))
                if up > math.prod(w[e] for e in S):
                    problems.append(f"node {v}, edges {S}: P[all up] = {up} exceeds product")
                if down > math.prod(1 - w[e] for e in S):
                    problems.append(f"node {v}, edges {S}: P[all down] = {down} exceeds product")
    for out in dist:
        deg = np.array(out, dtype=np.int64) @ g.incidence
        for j, v in enumerate(g.nodes):
            d = sum((w[e] for e in g.incident_edges(v)), Fraction(0))
            if not math.floor(d) <= deg[j] <= math.ceil(d):
                problems.append(f"outcome {out}: degree of {v} is {deg[j]}, fractional {d}")
    return problems


def stat_exante(
    method: Callable[[PopulationProfile, int, int], object],
    prof: PopulationProfile,
    h: int,
    M: int,
    seed: int,
    batch: Optional[Callable[[PopulationProfile, int, np.ndarray], np.ndarray]] = None,
) -> StatReport:
    """Mean seats per state against the standard quota.

    ``method(profile, h, seed)`` returns an Apportionment; ``batch``, if given,
    returns the (M, n) seat matrix for an array of seeds directly.
    """
    quota = standard_quota(prof, h)

    def sample(seeds: np.ndarray) -> np.ndarray:
        if batch is not None:
            return batch(prof, h, seeds)
        return np.array([method(prof, h, int(s)).seats for s in seeds])

    labels = [f"state {i + 1}" for i in range(prof.n)]
    return stat_marginals(sample, quota.values, M, seed, labels)
