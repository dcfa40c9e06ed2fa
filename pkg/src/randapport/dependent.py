"""Dependent (pipage) rounding of a single weighted bipartite graph."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .bipartite import (
    InstanceError,
    RoundingOutcome,
    WeightedBipartiteInstance,
    integer_weights,
    validate,
)
from .rng import stream_key, stream_keys


@dataclass(frozen=True)
class Structure:
    """Alternating edge sequence; even positions (0, 2, ...) are the "odd" edges."""

    edges: tuple[int, ...]
    is_cycle: bool

    @property
    def odd(self) -> tuple[int, ...]:
        return self.edges[0::2]

    @property
    def even(self) -> tuple[int, ...]:
        return self.edges[1::2]


class PipageState:
    """Current integer numerators over a shared denominator plus the draw counter."""

    def __init__(self, instance: WeightedBipartiteInstance, numerators: np.ndarray, L: int, key: int, step: int = 0):
        self.instance = instance
        self.numerators = numerators
        self.L = L
        self.key = key
        self.step = step

    @classmethod
    def start(cls, instance: WeightedBipartiteInstance, seed: int) -> "PipageState":
        validate(instance)
        if instance.T != 1:
            raise InstanceError("dependent rounding takes a single time step; use cumulative rounding")
        w, L = integer_weights(instance)
        return cls(instance, w, L, stream_key(seed))

    @property
    def weights(self) -> dict[tuple[str, str], Fraction]:
        return {
            e: Fraction(int(x), self.L) for e, x in zip(self.instance.graph.edges, self.numerators)
        }

    @property
    def fractional_edges(self) -> tuple[int, ...]:
        w = self.numerators
        return tuple(int(e) for e in np.flatnonzero((w > 0) & (w < self.L)))

    def copy(self) -> "PipageState":
        return PipageState(self.instance, self.numerators.copy(), self.L, self.key, self.step)


def _arrays(instance: WeightedBipartiteInstance):
    g = instance.graph
    eu, ev = g.endpoints
    adj_ptr, adj_edge = g.csr
    return eu, ev, adj_ptr, adj_edge


def _quiet():
    # uint64 wraparound is intended; plain-Python execution would warn about it
    return np.errstate(over="ignore")


def find_fractional_cycle_or_maximal_path(state: PipageState) -> Optional[Structure]:
    eu, ev, adj_ptr, adj_edge = _arrays(state.instance)
    n_nodes = len(adj_ptr) - 1
    pos = np.full(n_nodes, -1, dtype=np.int64)
    path_nodes = np.empty(n_nodes + 1, dtype=np.int64)
    path_edges = np.empty(len(eu) + 1, dtype=np.int64)
    first, count, cycle, _ = kernels.find_structure(
        eu, ev, adj_ptr, adj_edge, state.numerators, state.L, 0, pos, path_nodes, path_edges
    )
    if count == 0:
        return None
    return Structure(tuple(int(e) for e in path_edges[first:first + count]), bool(cycle))


def step_sizes(state: PipageState, structure: Structure) -> tuple[Fraction, Fraction]:
    edges = np.array(structure.edges, dtype=np.int64)
    alpha, beta = kernels.step_sizes(state.numerators, state.L, edges, 0, len(edges))
    if alpha + beta == 0:
        raise RuntimeError("degenerate pipage structure: alpha + beta = 0")
    return Fraction(int(alpha), state.L), Fraction(int(beta), state.L)


def pipage_step(state: PipageState, structure: Structure) -> PipageState:
    """Apply one randomized step, consuming one draw; returns a new state.

    With probability beta / (alpha + beta) odd edges gain alpha and even edges
    lose it; otherwise odd edges lose beta and even edges gain it.
    """
    step_sizes(state, structure)
    new = state.copy()
    edges = np.array(structure.edges, dtype=np.int64)
    with _quiet():
        kernels.apply_step(new.numerators, new.L, edges, 0, len(edges), np.uint64(new.key), new.step)
    new.step += 1
    return new


def run_to_completion(state: PipageState) -> PipageState:
    new = state.copy()
    eu, ev, adj_ptr, adj_edge = _arrays(state.instance)
    watch = np.ones(len(eu), dtype=np.bool_)
    n_frac = len(new.fractional_edges)
    with _quiet():
        new.step = int(
            kernels.pipage_run(
                eu, ev, adj_ptr, adj_edge, new.numerators, new.L, np.uint64(new.key), new.step, watch, n_frac
            )
        )
    return new


def dependent_round(instance: WeightedBipartiteInstance, seed: int) -> RoundingOutcome:
    state = run_to_completion(PipageState.start(instance, seed))
    bits = (state.numerators == state.L).astype(np.uint8)[None, :]
    return RoundingOutcome(instance, bits, seed)


def round_numerators_batch(
    instance: WeightedBipartiteInstance, w: np.ndarray, L: int, keys: np.ndarray
) -> np.ndarray:
    """Round integer numerators ``w`` once per stream key; returns bits (M, E)."""
    eu, ev, adj_ptr, adj_edge = _arrays(instance)
    out = np.empty((len(keys), len(w)), dtype=np.uint8)
    with _quiet():
        kernels.pipage_batch(eu, ev, adj_ptr, adj_edge, w, L, np.asarray(keys, dtype=np.uint64), out)
    return out


def dependent_round_batch(instance: WeightedBipartiteInstance, seeds: Sequence[int]) -> np.ndarray:
    """Bits for many seeds at once; row m equals ``dependent_round(instance, seeds[m]).bits[0]``."""
    validate(instance)
    if instance.T != 1:
        raise InstanceError("dependent rounding takes a single time step; use cumulative rounding")
    w, L = integer_weights(instance)
    return round_numerators_batch(instance, w, L, stream_keys(seeds))


def exact_distribution(instance: WeightedBipartiteInstance, max_fractional: int = 12) -> dict[tuple[int, ...], Fraction]:
    """Exact outcome distribution of the rounding procedure by branching on every coin.

    The structure choice is deterministic, so following both branches of each
    step with probabilities beta/(alpha+beta) and alpha/(alpha+beta) yields the
    procedure's distribution exactly.
    """
    validate(instance)
    if instance.T != 1:
        raise InstanceError("single time step expected")
    w0, L = integer_weights(instance)
    n_frac = int(np.count_nonzero((w0 > 0) & (w0 < L)))
    if n_frac > max_fractional:
        raise ValueError(f"{n_frac} fractional edges exceed the enumeration limit {max_fractional}")
    eu, ev, adj_ptr, adj_edge = _arrays(instance)
    n_nodes = len(adj_ptr) - 1
    pos = np.full(n_nodes, -1, dtype=np.int64)
    path_nodes = np.empty(n_nodes + 1, dtype=np.int64)
    path_edges = np.empty(len(eu) + 1, dtype=np.int64)
    dist: dict[tuple[int, ...], Fraction] = {}

    def branch(w: np.ndarray, prob: Fraction) -> None:
        first, count, _, _ = kernels.find_structure(
            eu, ev, adj_ptr, adj_edge, w, L, 0, pos, path_nodes, path_edges
        )
        if count == 0:
            outcome = tuple(int(x == L) for x in w)
            dist[outcome] = dist.get(outcome, Fraction(0)) + prob
            return
        edges = path_edges[first:first + count].copy()
        alpha, beta = kernels.step_sizes(w, L, edges, 0, count)
        alpha, beta = int(alpha), int(beta)
        for delta, p in ((alpha, Fraction(beta, alpha + beta)), (-beta, Fraction(alpha, alpha + beta))):
            nw = w.copy()
            nw[edges[0::2]] += delta
            nw[edges[1::2]] -= delta
            branch(nw, prob * p)

    branch(w0.copy(), Fraction(1))
    return dist
