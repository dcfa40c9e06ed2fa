"""Cumulative rounding: T weighted copies of a bipartite graph, linked by gadget nodes.

For every original node ``v`` and step ``t`` the layered graph adds ``v^t`` (the
copy), ``v#1^t`` and ``v#2^t`` (the two gadget nodes) and the chain node
``v^{t:t+1}``, plus ``v^{0:1}``. Each (v, t) contributes four gadget edges::

    (v^{t-1:t}, v#1^t)  frac(S_{t-1})
    (v#1^t, v^{t:t+1})  1 - frac(S_t)
    (v^t, v#2^t)        1 - frac(d_t)
    (v#2^t, v#1^t)      frac(d_t)

where ``d_t`` is v's fractional degree at step t and ``S_t = d_1 + ... + d_t``.
Rounding the layered graph once and reading the copy edges gives bits that
keep every per-step degree and every cumulative degree within floor/ceiling.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .bipartite import (
    BipartiteGraph,
    InstanceError,
    RoundingOutcome,
    WeightedBipartiteInstance,
    degree_table,
    integer_weights,
    validate,
)
from .dependent import _quiet, round_numerators_batch
from . import kernels
from .rng import stream_key, stream_keys

# gadget edge kinds, in their order within each (v, t) block
CHAIN_IN, CHAIN_OUT, TOP, MIDDLE = range(4)


def _frac(x: Fraction) -> Fraction:
    return x - math.floor(x)


def copy_name(v: str, t: int) -> str:
    return f"{v}^{t}"


def onebar_name(v: str, t: int) -> str:
    return f"{v}#1^{t}"


def twobar_name(v: str, t: int) -> str:
    return f"{v}#2^{t}"


def chain_name(v: str, t: int) -> str:
    return f"{v}^{{{t}:{t + 1}}}"


@dataclass(frozen=True)
class LayeredGraph:
    """The constructed instance (a single weight layer) and its back-references.

    ``copy_edge[t - 1, e]`` is the layered edge index for original edge ``e`` at
    step ``t``; ``gadget_edge[t - 1, v, kind]`` indexes the four gadget edges.
    """

    source: WeightedBipartiteInstance
    instance: WeightedBipartiteInstance
    copy_edge: np.ndarray
    gadget_edge: np.ndarray
    degrees: dict[str, list[Fraction]]
    cumulative: dict[str, list[Fraction]]

    @property
    def T(self) -> int:
        return self.source.T

    def layer_watch(self, layers: int) -> np.ndarray:
        """Mask of copy edges in steps 1..layers."""
        mask = np.zeros(len(self.instance.graph.edges), dtype=np.bool_)
        mask[self.copy_edge[:layers].ravel()] = True
        return mask

    def node_fractional_degrees(self) -> dict[str, Fraction]:
        w = self.instance.weights[0]
        out = {v: Fraction(0) for v in self.instance.graph.nodes}
        for (a, b), x in zip(self.instance.graph.edges, w):
            out[a] += x
            out[b] += x
        return out

    def export_json(self) -> dict:
        return self.instance.to_json()


def build_layered_graph(instance: WeightedBipartiteInstance) -> LayeredGraph:
    validate(instance)
    g = instance.graph
    T = instance.T
    nodes = g.nodes
    a_set = set(g.a_nodes)
    degrees = degree_table(instance)
    cumulative = {}
    for v in nodes:
        run = [Fraction(0)]
        for d in degrees[v]:
            run.append(run[-1] + d)
        cumulative[v] = run  # cumulative[v][t] = S_t, with S_0 = 0

    # bipartition: copies and #1 nodes of A-side originals, #2 nodes and chain
    # nodes of B-side originals form one side
    left, right = [], []

    def place(name: str, on_left: bool) -> None:
        (left if on_left else right).append(name)

    for v in nodes:
        in_a = v in a_set
        place(chain_name(v, 0), not in_a)
        for t in range(1, T + 1):
            place(copy_name(v, t), in_a)
            place(onebar_name(v, t), in_a)
            place(twobar_name(v, t), not in_a)
            place(chain_name(v, t), not in_a)

    edges: list[tuple[str, str]] = []
    weights: list[Fraction] = []
    left_set = set(left)

    def add(x: str, y: str, w: Fraction) -> int:
        edges.append((x, y) if x in left_set else (y, x))
        weights.append(w)
        return len(edges) - 1

    copy_edge = np.empty((T, len(g.edges)), dtype=np.int64)
    gadget_edge = np.empty((T, len(nodes), 4), dtype=np.int64)
    for t in range(1, T + 1):
        row = instance.weights[t - 1]
        for k, (a, b) in enumerate(g.edges):
            copy_edge[t - 1, k] = add(copy_name(a, t), copy_name(b, t), row[k])
        for j, v in enumerate(nodes):
            d = degrees[v][t - 1]
            s_prev, s_now = cumulative[v][t - 1], cumulative[v][t]
            gadget_edge[t - 1, j, CHAIN_IN] = add(chain_name(v, t - 1), onebar_name(v, t), _frac(s_prev))
            gadget_edge[t - 1, j, CHAIN_OUT] = add(onebar_name(v, t), chain_name(v, t), 1 - _frac(s_now))
            gadget_edge[t - 1, j, TOP] = add(copy_name(v, t), twobar_name(v, t), 1 - _frac(d))
            gadget_edge[t - 1, j, MIDDLE] = add(twobar_name(v, t), onebar_name(v, t), _frac(d))

    layered = WeightedBipartiteInstance(BipartiteGraph(tuple(left), tuple(right), tuple(edges)), (tuple(weights),))
    lg = LayeredGraph(instance, layered, copy_edge, gadget_edge, degrees, cumulative)
    problems = check_degree_table(lg)
    if problems:
        raise AssertionError("layered graph violates the fractional-degree table: " + "; ".join(problems))
    return lg


def check_degree_table(lg: LayeredGraph) -> list[str]:
    """Compare every constructed node's fractional degree with its closed form."""
    frac = lg.node_fractional_degrees()
    T = lg.T
    problems = []

    def expect(name: str, value) -> None:
        if frac[name] != value:
            problems.append(f"{name}: {frac[name]} != {value}")

    for v in lg.source.graph.nodes:
        S = lg.cumulative[v]
        expect(chain_name(v, 0), 0)
        for t in range(1, T + 1):
            d = lg.degrees[v][t - 1]
            expect(copy_name(v, t), math.floor(d) + 1)
            expect(onebar_name(v, t), math.floor(S[t]) - math.floor(S[t - 1]) - math.floor(d) + 1)
            expect(twobar_name(v, t), 1)
            if t < T:
                expect(chain_name(v, t), 1)
    return problems


class PartialRounding:
    """A paused cumulative rounding run; resumable and JSON-serialisable.

    Pausing never changes the result: the run continues with the same draws
    it would have used without the pause.
    """

    def __init__(self, layered: LayeredGraph, numerators: np.ndarray, L: int, key: int, step: int, seed: Optional[int]):
        self.layered = layered
        self.numerators = numerators
        self.L = L
        self.key = key
        self.step = step
        self.seed = seed

    def layers_settled(self) -> int:
        """Largest t such that every copy edge in steps 1..t is integral."""
        w = self.numerators[self.layered.copy_edge]
        settled = np.all((w == 0) | (w == self.L), axis=1)
        bad = np.flatnonzero(~settled)
        return int(bad[0]) if len(bad) else self.layered.T

    def bits(self, layers: Optional[int] = None) -> np.ndarray:
        layers = self.layered.T if layers is None else layers
        if self.layers_settled() < layers:
            raise ValueError(f"only {self.layers_settled()} layers are settled")
        return (self.numerators[self.layered.copy_edge[:layers]] == self.L).astype(np.uint8)

    @property
    def complete(self) -> bool:
        w = self.numerators
        return not np.any((w > 0) & (w < self.L))

    def resume(self, stop_after_layer: Optional[int] = None) -> "PartialRounding":
        lg = self.layered
        g = lg.instance.graph
        eu, ev = g.endpoints
        adj_ptr, adj_edge = g.csr
        w = self.numerators.copy()
        if stop_after_layer is None:
            watch = np.ones(len(w), dtype=np.bool_)
        else:
            watch = lg.layer_watch(min(stop_after_layer, lg.T))
        n_watch = int(np.count_nonzero(watch & (w > 0) & (w < self.L)))
        with _quiet():
            step = kernels.pipage_run(eu, ev, adj_ptr, adj_edge, w, self.L, np.uint64(self.key), self.step, watch, n_watch)
        return PartialRounding(lg, w, self.L, self.key, int(step), self.seed)

    def outcome(self) -> RoundingOutcome:
        if not self.complete:
            raise ValueError("rounding has not finished; call resume() first")
        full = (self.numerators == self.L).astype(np.uint8)
        return RoundingOutcome(self.layered.source, full[self.layered.copy_edge], self.seed, full)

    def to_json(self) -> dict:
        return {
            "source": self.layered.source.to_json(),
            "denominator": self.L,
            "numerators": [int(x) for x in self.numerators],
            "key": str(self.key),
            "step": self.step,
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, data) -> "PartialRounding":
        if isinstance(data, (str, bytes)):
            data = json.loads(data)
        lg = build_layered_graph(WeightedBipartiteInstance.from_json(data["source"]))
        w = np.array(data["numerators"], dtype=np.int64)
        if len(w) != len(lg.instance.graph.edges) or int(data["denominator"]) != lg.instance.denominator:
            raise InstanceError("saved state does not match its source instance")
        return cls(lg, w, int(data["denominator"]), int(data["key"]), int(data["step"]), data.get("seed"))


def start_cumulative(instance: WeightedBipartiteInstance, seed: int, layered: Optional[LayeredGraph] = None) -> PartialRounding:
    lg = layered if layered is not None else build_layered_graph(instance)
    w, L = integer_weights(lg.instance)
    return PartialRounding(lg, w, L, stream_key(seed), 0, seed)


def cumulative_round(
    instance: WeightedBipartiteInstance,
    seed: int,
    stop_after_layer: Optional[int] = None,
    layered: Optional[LayeredGraph] = None,
):
    """Round all T steps jointly.

    Returns a :class:`RoundingOutcome`, or a :class:`PartialRounding` when
    ``stop_after_layer`` is given (halts once steps 1..stop_after_layer are
    integral).
    """
    state = start_cumulative(instance, seed, layered).resume(stop_after_layer)
    if stop_after_layer is not None:
        return state
    return state.outcome()


def cumulative_round_batch(
    instance: WeightedBipartiteInstance,
    seeds: Sequence[int],
    layered: Optional[LayeredGraph] = None,
    keys: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Copy-edge bits for many runs: array (M, T, E); run m equals seed ``seeds[m]``."""
    lg = layered if layered is not None else build_layered_graph(instance)
    w, L = integer_weights(lg.instance)
    if keys is None:
        keys = stream_keys(seeds)
    full = round_numerators_batch(lg.instance, w, L, keys)
    return full[:, lg.copy_edge]


def interpretation_bits(lg: LayeredGraph, copy_bits: np.ndarray) -> np.ndarray:
    """Gadget-edge bits implied by the copy-edge bits under the event reading.

    TOP is up iff v's degree at t was rounded down; MIDDLE iff it was rounded
    up; CHAIN_IN iff the cumulative degree through t-1 was rounded up;
    CHAIN_OUT iff the cumulative degree through t was rounded down. Returns
    an array (T, V, 4).
    """
    src = lg.source
    D = copy_bits.astype(np.int64) @ src.graph.incidence  # (T, V)
    T, V = D.shape
    out = np.zeros((T, V, 4), dtype=np.uint8)
    for j, v in enumerate(src.graph.nodes):
        S = lg.cumulative[v]
        total = 0
        for t in range(1, T + 1):
            prev_total = total
            total += int(D[t - 1, j])
            fl = math.floor(lg.degrees[v][t - 1])
            out[t - 1, j, TOP] = D[t - 1, j] == fl
            out[t - 1, j, MIDDLE] = D[t - 1, j] == fl + 1
            out[t - 1, j, CHAIN_IN] = prev_total == math.floor(S[t - 1]) + 1
            out[t - 1, j, CHAIN_OUT] = total == math.floor(S[t])
    return out


def audit_outcome(
    instance: WeightedBipartiteInstance, outcome: RoundingOutcome, layered: Optional[LayeredGraph] = None
) -> list[str]:
    """List every violated guarantee; an empty list means the outcome is sound.

    Checks per-step and cumulative degree preservation for each node, and,
    when the outcome carries its layered bits, that those bits agree with the
    copy bits and with the event reading of every gadget edge.
    """
    violations = []
    g = instance.graph
    bits = np.asarray(outcome.bits)
    if bits.shape != (instance.T, len(g.edges)):
        return [f"outcome shape {bits.shape} does not match instance ({instance.T}, {len(g.edges)})"]
    D = bits.astype(np.int64) @ g.incidence
    degrees = degree_table(instance)
    for j, v in enumerate(g.nodes):
        S = Fraction(0)
        total = 0
        for t in range(1, instance.T + 1):
            d = degrees[v][t - 1]
            S += d
            total += int(D[t - 1, j])
            if not math.floor(d) <= D[t - 1, j] <= math.ceil(d):
                violations.append(f"degree of {v} at t={t} is {D[t - 1, j]}, fractional degree {d}")
            if not math.floor(S) <= total <= math.ceil(S):
                violations.append(f"cumulative degree of {v} through t={t} is {total}, fractional {S}")
    full = outcome._layered_bits
    if full is not None:
        lg = layered if layered is not None else build_layered_graph(instance)
        copy_from_full = full[lg.copy_edge]
        mismatch = np.argwhere(copy_from_full != bits)
        for t0, k in mismatch:
            a, b = g.edges[k]
            violations.append(f"copy bit of ({a}, {b}) at t={t0 + 1} disagrees with the layered graph")
        expected = interpretation_bits(lg, bits)
        actual = full[lg.gadget_edge]
        kinds = ("chain-in", "chain-out", "top", "middle")
        for t0, j, kind in np.argwhere(expected != actual):
            violations.append(
                f"{kinds[kind]} gadget edge of {g.nodes[j]} at t={t0 + 1} is {actual[t0, j, kind]}, "
                f"event says {expected[t0, j, kind]}"
            )
    return violations


def star_instance(weights: Sequence[Sequence[Fraction]], leaf_names: Sequence[str], center: str = "a") -> WeightedBipartiteInstance:
    """Star with one center and one leaf per entry; ``weights[t][i]`` per step."""
    edges = tuple((center, b) for b in leaf_names)
    return WeightedBipartiteInstance(BipartiteGraph((center,), tuple(leaf_names), edges), tuple(tuple(r) for r in weights))
