"""Bipartite graphs with exact per-time-step edge weights."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .core import format_rational, parse_rational
from .kernels import MAX_DENOMINATOR


class InstanceError(ValueError):
    """Raised for malformed graphs or weight tables."""


Edge = tuple[str, str]


@dataclass(frozen=True)
class BipartiteGraph:
    a_nodes: tuple[str, ...]
    b_nodes: tuple[str, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, "a_nodes", tuple(str(v) for v in self.a_nodes))
        object.__setattr__(self, "b_nodes", tuple(str(v) for v in self.b_nodes))
        object.__setattr__(self, "edges", tuple((str(a), str(b)) for a, b in self.edges))
        nodes = self.a_nodes + self.b_nodes
        if len(set(nodes)) != len(nodes):
            raise InstanceError("node ids must be unique across both sides")
        a_side, b_side = set(self.a_nodes), set(self.b_nodes)
        seen = set()
        for a, b in self.edges:
            if a not in a_side or b not in b_side:
                raise InstanceError(f"edge ({a}, {b}) does not join the A side to the B side")
            if (a, b) in seen:
                raise InstanceError(f"duplicate edge ({a}, {b})")
            seen.add((a, b))

    @property
    def nodes(self) -> tuple[str, ...]:
        return self.a_nodes + self.b_nodes

    @cached_property
    def node_index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.nodes)}

    @cached_property
    def edge_index(self) -> dict[Edge, int]:
        return {e: k for k, e in enumerate(self.edges)}

    @cached_property
    def endpoints(self) -> tuple[np.ndarray, np.ndarray]:
        idx = self.node_index
        eu = np.array([idx[a] for a, _ in self.edges], dtype=np.int64)
        ev = np.array([idx[b] for _, b in self.edges], dtype=np.int64)
        return eu, ev

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Incidence lists: node v's edges are adj_edge[adj_ptr[v]:adj_ptr[v+1]], ascending."""
        eu, ev = self.endpoints
        n = len(self.nodes)
        deg = np.zeros(n + 1, dtype=np.int64)
        np.add.at(deg, eu + 1, 1)
        np.add.at(deg, ev + 1, 1)
        adj_ptr = np.cumsum(deg)
        adj_edge = np.empty(2 * len(self.edges), dtype=np.int64)
        fill = adj_ptr[:-1].copy()
        for e in range(len(self.edges)):
            for v in (eu[e], ev[e]):
                adj_edge[fill[v]] = e
                fill[v] += 1
        return adj_ptr, adj_edge

    @cached_property
    def incidence(self) -> np.ndarray:
        """Edge-by-node 0/1 matrix, for vectorised degree sums."""
        eu, ev = self.endpoints
        inc = np.zeros((len(self.edges), len(self.nodes)), dtype=np.int32)
        inc[np.arange(len(self.edges)), eu] = 1
        inc[np.arange(len(self.edges)), ev] = 1
        return inc

    def incident_edges(self, v: str) -> list[int]:
        adj_ptr, adj_edge = self.csr
        i = self._node(v)
        return [int(e) for e in adj_edge[adj_ptr[i]:adj_ptr[i + 1]]]

    def _node(self, v: str) -> int:
        try:
            return self.node_index[v]
        except KeyError:
            raise InstanceError(f"unknown node {v!r}") from None


@dataclass(frozen=True)
class WeightedBipartiteInstance:
    """Graph plus one weight per edge and time step.

    ``weights[t][e]`` is the weight of edge ``e`` at time ``t + 1``; ``None``
    marks a missing entry (rejected by :func:`validate`).
    """

    graph: BipartiteGraph
    weights: tuple[tuple[Optional[Fraction], ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(row) for row in self.weights)
        object.__setattr__(self, "weights", rows)

    @property
    def T(self) -> int:
        return len(self.weights)

    def weight(self, edge: Edge, t: int) -> Fraction:
        self._check_t(t)
        return self.weights[t - 1][self.graph.edge_index[edge]]

    def _check_t(self, t: int) -> None:
        if not 1 <= t <= self.T:
            raise InstanceError(f"time step {t} outside 1..{self.T}")

    @cached_property
    def denominator(self) -> int:
        """Least common denominator of all weights."""
        L = 1
        for row in self.weights:
            for w in row:
                L = math.lcm(L, w.denominator)
        return L

    @classmethod
    def from_weight_lists(
        cls,
        a_nodes: Sequence[str],
        b_nodes: Sequence[str],
        edges: Sequence[tuple[str, str, Sequence]],
        T: Optional[int] = None,
    ) -> "WeightedBipartiteInstance":
        """Build from ``(a, b, [w^1, ..., w^T])`` triples, as in the JSON format."""
        graph = BipartiteGraph(tuple(a_nodes), tuple(b_nodes), tuple((a, b) for a, b, _ in edges))
        if T is None:
            T = max((len(ws) for _, _, ws in edges), default=1)
        rows = []
        for t in range(T):
            row = []
            for a, b, ws in edges:
                row.append(parse_rational(ws[t]) if t < len(ws) else None)
            rows.append(tuple(row))
        return cls(graph, tuple(rows))

    @classmethod
    def from_json(cls, data) -> "WeightedBipartiteInstance":
        if isinstance(data, (str, bytes)):
            data = json.loads(data, parse_float=Fraction)
        try:
            a_nodes = data["a_nodes"]
            b_nodes = data["b_nodes"]
            T = int(data["T"])
            raw_edges = data["edges"]
        except (KeyError, TypeError, ValueError) as exc:
            raise InstanceError(f"malformed instance: {exc}") from exc
        if T < 1:
            raise InstanceError("T must be positive")
        edges = []
        for item in raw_edges:
            try:
                a, b, ws = item["a"], item["b"], item["weights"]
            except (KeyError, TypeError) as exc:
                raise InstanceError(f"malformed edge entry {item!r}") from exc
            parsed = []
            for k, w in enumerate(ws):
                try:
                    parsed.append(parse_rational(w))
                except (ValueError, TypeError) as exc:
                    raise InstanceError(f"edge ({a}, {b}) at t={k + 1}: {exc}") from exc
            if len(parsed) > T:
                raise InstanceError(f"edge ({a}, {b}) has {len(parsed)} weights for T={T}")
            edges.append((a, b, parsed))
        return cls.from_weight_lists(a_nodes, b_nodes, edges, T=T)

    def to_json(self) -> dict:
        return {
            "a_nodes": list(self.graph.a_nodes),
            "b_nodes": list(self.graph.b_nodes),
            "T": self.T,
            "edges": [
                {
                    "a": a,
                    "b": b,
                    "weights": [format_rational(self.weights[t][k]) for t in range(self.T)],
                }
                for k, (a, b) in enumerate(self.graph.edges)
            ],
        }


def validate(instance: WeightedBipartiteInstance) -> None:
    """Raise :class:`InstanceError` unless every weight is present and in [0, 1].

    Bipartiteness and edge uniqueness are enforced when the graph is built.
    """
    if instance.T < 1:
        raise InstanceError("T must be positive")
    edges = instance.graph.edges
    for t, row in enumerate(instance.weights, start=1):
        if len(row) != len(edges):
            raise InstanceError(f"time step {t} has {len(row)} weights for {len(edges)} edges")
        for (a, b), w in zip(edges, row):
            if w is None:
                raise InstanceError(f"edge ({a}, {b}) at t={t}: missing weight")
            if not isinstance(w, Fraction):
                raise InstanceError(f"edge ({a}, {b}) at t={t}: weight is not exact")
            if not 0 <= w <= 1:
                raise InstanceError(f"edge ({a}, {b}) at t={t}: weight out of range ({w})")


def fractional_degree(instance: WeightedBipartiteInstance, v: str, t: int) -> Fraction:
    instance._check_t(t)
    row = instance.weights[t - 1]
    return sum((row[e] for e in instance.graph.incident_edges(v)), Fraction(0))


def degree_table(instance: WeightedBipartiteInstance) -> dict[str, list[Fraction]]:
    """Fractional degree of every node at every time step."""
    return {
        v: [fractional_degree(instance, v, t) for t in range(1, instance.T + 1)]
        for v in instance.graph.nodes
    }


def integer_weights(instance: WeightedBipartiteInstance, t: int = 1) -> tuple[np.ndarray, int]:
    """Weights of layer ``t`` as integer numerators over the common denominator."""
    L = instance.denominator
    if L >= MAX_DENOMINATOR:
        raise InstanceError(f"common denominator {L} exceeds the exact kernel limit {MAX_DENOMINATOR}")
    row = instance.weights[t - 1]
    w = np.array([int(x * L) for x in row], dtype=np.int64)
    return w, L


@dataclass(frozen=True)
class RoundingOutcome:
    """Rounded bits ``bits[t - 1, e]`` (X_e^t) for an instance."""

    instance: WeightedBipartiteInstance
    bits: np.ndarray
    seed: Optional[int] = None
    # full bit vector of the constructed graph, kept for auditing only
    _layered_bits: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def bit(self, edge: Edge, t: int) -> int:
        self.instance._check_t(t)
        return int(self.bits[t - 1, self.instance.graph.edge_index[edge]])

    def degree(self, v: str, t: int) -> int:
        self.instance._check_t(t)
        g = self.instance.graph
        return int(sum(self.bits[t - 1, e] for e in g.incident_edges(v)))

    def degrees(self) -> np.ndarray:
        """Array ``D[t - 1, node]``."""
        return self.bits.astype(np.int64) @ self.instance.graph.incidence

    def as_map(self) -> dict[tuple[Edge, int], int]:
        g = self.instance.graph
        return {
            (edge, t + 1): int(self.bits[t, k])
            for t in range(self.instance.T)
            for k, edge in enumerate(g.edges)
        }

    def with_bits(self, bits: np.ndarray) -> "RoundingOutcome":
        return RoundingOutcome(self.instance, bits, self.seed, self._layered_bits)
