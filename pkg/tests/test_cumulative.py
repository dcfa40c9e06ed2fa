import json
import math
from fractions import Fraction

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from randapport.bipartite import WeightedBipartiteInstance
from randapport.cumulative import (
    CHAIN_OUT,
    PartialRounding,
    audit_outcome,
    build_layered_graph,
    check_degree_table,
    cumulative_round,
    cumulative_round_batch,
    onebar_name,
    star_instance,
)
from randapport.dependent import dependent_round

from conftest import random_instance

F = Fraction


def test_node_and_edge_counts():
    star = star_instance([[F(1, 4)] * 4] * 3, ["b1", "b2", "b3", "b4"])
    lg = build_layered_graph(star)
    assert len(lg.instance.graph.nodes) == 65
    assert len(lg.instance.graph.edges) == 72


def test_chain_out_weight():
    inst = WeightedBipartiteInstance.from_weight_lists(["v"], ["b"], [("v", "b", ["3/4", "3/4"])])
    lg = build_layered_graph(inst)
    e = lg.gadget_edge[1, 0, CHAIN_OUT]
    assert lg.instance.weights[0][e] == F(1, 2)
    assert lg.instance.graph.edges[e][0] == onebar_name("v", 2) or lg.instance.graph.edges[e][1] == onebar_name("v", 2)


def test_integral_degrees_give_integral_gadgets():
    inst = WeightedBipartiteInstance.from_weight_lists(
        ["a"], ["b", "c"], [("a", "b", ["1/2", "1"]), ("a", "c", ["1/2", "0"])]
    )
    lg = build_layered_graph(inst)
    ws = lg.instance.weights[0]
    for e in lg.gadget_edge[:, 0].ravel():
        assert ws[e] in (0, 1)


def test_degree_table_and_integrality(fig1, rng):
    for inst in [fig1] + [random_instance(rng, T=int(rng.integers(1, 6))) for _ in range(20)]:
        lg = build_layered_graph(inst)
        assert check_degree_table(lg) == []
        assert all(d.denominator == 1 for v, d in lg.node_fractional_degrees().items() if not v.endswith("{%d:%d}" % (lg.T, lg.T + 1)))


def test_fig1_totals(fig1):
    for seed in range(300):
        out = cumulative_round(fig1, seed)
        D = [out.degree("v1", t) for t in (1, 2, 3)]
        assert sum(D) == 3
        assert D[0] + D[1] in (1, 2)
        assert audit_outcome(fig1, out) == []


def test_fig1_marginal(fig1):
    bits = cumulative_round_batch(fig1, np.arange(100_000, dtype=np.uint64))
    est = bits[:, 0, 0].mean()
    assert abs(est - 0.25) <= 4 * math.sqrt(0.25 * 0.75 / 100_000)


def test_corrupted_outcome_flagged(fig1):
    out = cumulative_round(fig1, 3)
    bits = out.bits.copy()
    bits[0, 0] ^= 1
    assert audit_outcome(fig1, out.with_bits(bits))


def test_integral_instance_reproduced():
    inst = WeightedBipartiteInstance.from_weight_lists(["a"], ["b", "c"], [("a", "b", ["1", "0"]), ("a", "c", ["0", "1"])])
    out = cumulative_round(inst, 0)
    assert out.bits.tolist() == [[1, 0], [0, 1]]
    assert audit_outcome(inst, out) == []


def test_single_step_agrees_in_law():
    inst = star_instance([[F(1, 2), F(1, 2)]], ["x", "y"])
    for seed in range(50):
        out = cumulative_round(inst, seed)
        assert out.bits.sum() == 1
        assert dependent_round(inst, seed).bits.sum() == 1


def test_pause_and_resume(fig1):
    full = cumulative_round(fig1, 11)
    part = cumulative_round(fig1, 11, stop_after_layer=1)
    assert part.layers_settled() >= 1
    assert part.bits(1).tolist() == full.bits[:1].tolist()
    restored = PartialRounding.from_json(json.dumps(part.to_json()))
    assert restored.resume().outcome().bits.tolist() == full.bits.tolist()


def test_batch_matches_single(rng):
    inst = random_instance(rng, T=4)
    bits = cumulative_round_batch(inst, np.arange(30, dtype=np.uint64))
    for s in range(30):
        assert bits[s].tolist() == cumulative_round(inst, s).bits.tolist()


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 8), st.integers(0, 2**64 - 1))
def test_cumulative_preservation_property(inst_seed, T, seed):
    inst = random_instance(np.random.default_rng(inst_seed), T=T)
    lg = build_layered_graph(inst)
    out = cumulative_round(inst, seed, layered=lg)
    assert audit_outcome(inst, out, lg) == []
    D = out.degrees()
    for j, v in enumerate(inst.graph.nodes):
        S = lg.cumulative[v]
        for t in range(1, T + 1):
            if S[t].denominator == 1:
                assert D[:t, j].sum() == S[t]
