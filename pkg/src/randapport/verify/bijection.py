"""Quota seat sequences versus perfect b-matchings of the constructed star graph.

Targets are the constructed graph's fractional degrees, which are all integers
when T = P. Weight-0 edges are excluded and weight-1 edges forced. Each quota
sequence is mapped to an edge labelling by the event reading of the gadget
edges; the matchings are counted separately by a plain search that knows
nothing about sequences.
"""

from __future__ import annotations

import numpy as np

from ..core import PopulationProfile
from ..cumulative import build_layered_graph, interpretation_bits
from ..methods import star_for_profile
from .quota import quota_sequences

MAX_POPULATION = 10


def _targets(lg) -> dict[str, int]:
    out = {}
    for v, d in lg.node_fractional_degrees().items():
        if d.denominator != 1:
            raise AssertionError(f"node {v} has non-integer fractional degree {d}")
        out[v] = int(d)
    return out


def sequence_labelling(lg, seq: tuple[int, ...], n: int) -> np.ndarray:
    """Full 0/1 vector over constructed edges for one seat sequence."""
    T = lg.T
    copy_bits = np.zeros((T, n), dtype=np.uint8)
    copy_bits[np.arange(T), list(seq)] = 1
    gadget = interpretation_bits(lg, copy_bits)
    full = np.zeros(len(lg.instance.graph.edges), dtype=np.uint8)
    full[lg.copy_edge] = copy_bits
    full[lg.gadget_edge] = gadget
    return full


def enumerate_b_matchings(lg, limit: int = 1_000_000) -> list[frozenset[int]]:
    """Every edge set meeting all targets, using only fractional and weight-1 edges."""
    g = lg.instance.graph
    weights = lg.instance.weights[0]
    idx = g.node_index
    need = [0] * len(g.nodes)
    for v, d in _targets(lg).items():
        need[idx[v]] = d
    forced = []
    free = []
    for k, ((a, b), w) in enumerate(zip(g.edges, weights)):
        if w == 1:
            forced.append(k)
            need[idx[a]] -= 1
            need[idx[b]] -= 1
        elif w > 0:
            free.append(k)
    if min(need, default=0) < 0:
        return []
    ends = [(idx[g.edges[k][0]], idx[g.edges[k][1]]) for k in free]
    left = [0] * len(g.nodes)
    for u, v in ends:
        left[u] += 1
        left[v] += 1
    found: list[frozenset[int]] = []
    chosen: list[int] = []

    def walk(pos: int) -> None:
        if len(found) >= limit:
            raise RuntimeError("b-matching enumeration limit reached")
        if pos == len(free):
            if not any(need):
                found.append(frozenset(forced + chosen))
            return
        u, v = ends[pos]
        left[u] -= 1
        left[v] -= 1
        if need[u] > 0 and need[v] > 0:
            need[u] -= 1
            need[v] -= 1
            chosen.append(free[pos])
            if need[u] <= left[u] and need[v] <= left[v]:
                walk(pos + 1)
            chosen.pop()
            need[u] += 1
            need[v] += 1
        if need[u] <= left[u] and need[v] <= left[v]:
            walk(pos + 1)
        left[u] += 1
        left[v] += 1

    walk(0)
    return found


def verify_bijection(prof: PopulationProfile) -> dict:
    if prof.total > MAX_POPULATION:
        raise ValueError(f"total population {prof.total} exceeds the limit {MAX_POPULATION}")
    lg = build_layered_graph(star_for_profile(prof))
    g = lg.instance.graph
    weights = np.array([float(w) for w in lg.instance.weights[0]])
    targets = _targets(lg)
    inc = g.incidence
    target_vec = np.array([targets[v] for v in g.nodes])
    problems = []
    labelled = set()
    sequences = list(quota_sequences(prof))
    for seq in sequences:
        full = sequence_labelling(lg, seq, prof.n)
        deg = full.astype(np.int64) @ inc
        bad = np.flatnonzero(deg != target_vec)
        if len(bad):
            problems.append(f"sequence {[i + 1 for i in seq]}: node {g.nodes[bad[0]]} has degree {deg[bad[0]]}, target {target_vec[bad[0]]}")
        if np.any(full[weights == 0]) or not np.all(full[weights == 1]):
            problems.append(f"sequence {[i + 1 for i in seq]} uses a weight-0 edge or skips a weight-1 edge")
        labelled.add(frozenset(int(k) for k in np.flatnonzero(full)))
    if len(labelled) != len(sequences):
        problems.append("two sequences map to the same labelling")
    matchings = enumerate_b_matchings(lg)
    if set(matchings) != labelled:
        problems.append(
            f"{len(set(matchings) - labelled)} matchings have no sequence, "
            f"{len(labelled - set(matchings))} labellings are not matchings"
        )
    return {
        "check": "bijection",
        "profile": list(prof.populations),
        "sequences": len(sequences),
        "matchings": len(matchings),
        "problems": problems,
        "certified": not problems and len(sequences) == len(matchings),
    }
