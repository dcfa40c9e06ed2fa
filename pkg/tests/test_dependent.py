from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from randapport.bipartite import InstanceError, WeightedBipartiteInstance
from randapport.cumulative import star_instance
from randapport.dependent import (
    PipageState,
    dependent_round,
    dependent_round_batch,
    exact_distribution,
    find_fractional_cycle_or_maximal_path,
    pipage_step,
    run_to_completion,
    step_sizes,
)

from conftest import random_instance

F = Fraction


def single(edges, A, B):
    return WeightedBipartiteInstance.from_weight_lists(A, B, [(a, b, [w]) for a, b, w in edges])


def path2(w1, w2):
    return single([("a", "b1", w1), ("a", "b2", w2)], ["a"], ["b1", "b2"])


def test_star_pair_is_maximal_path():
    st_ = PipageState.start(path2(F(1, 2), F(1, 2)), 0)
    s = find_fractional_cycle_or_maximal_path(st_)
    assert not s.is_cycle and sorted(s.edges) == [0, 1]


def test_integral_has_no_structure():
    st_ = PipageState.start(path2(F(1), F(0)), 0)
    assert find_fractional_cycle_or_maximal_path(st_) is None


def test_four_cycle_found():
    inst = single(
        [("a1", "b1", F(1, 2)), ("a1", "b2", F(1, 2)), ("a2", "b1", F(1, 2)), ("a2", "b2", F(1, 2))],
        ["a1", "a2"],
        ["b1", "b2"],
    )
    s = find_fractional_cycle_or_maximal_path(PipageState.start(inst, 0))
    assert s.is_cycle and sorted(s.edges) == [0, 1, 2, 3]


def test_step_sizes_formula():
    st_ = PipageState.start(path2(F(1, 4), F(3, 4)), 0)
    s = find_fractional_cycle_or_maximal_path(st_)
    alpha, beta = step_sizes(st_, s)
    if s.odd == (0,):
        assert (alpha, beta) == (F(3, 4), F(1, 4))
    else:
        assert (alpha, beta) == (F(1, 4), F(3, 4))


def test_exact_step_distribution():
    assert exact_distribution(path2(F(1, 2), F(1, 2))) == {(1, 0): F(1, 2), (0, 1): F(1, 2)}
    assert exact_distribution(path2(F(1, 4), F(3, 4))) == {(1, 0): F(1, 4), (0, 1): F(3, 4)}


def test_pipage_step_settles_an_edge():
    st_ = PipageState.start(path2(F(1, 3), F(1, 3)), 9)
    s = find_fractional_cycle_or_maximal_path(st_)
    new = pipage_step(st_, s)
    assert len(new.fractional_edges) < len(st_.fractional_edges)
    assert new.step == 1 and st_.step == 0


def test_cycle_step_preserves_sum():
    inst = single(
        [("a1", "b1", F(1, 3)), ("a1", "b2", F(1, 2)), ("a2", "b1", F(1, 4)), ("a2", "b2", F(1, 5))],
        ["a1", "a2"],
        ["b1", "b2"],
    )
    st_ = PipageState.start(inst, 1)
    s = find_fractional_cycle_or_maximal_path(st_)
    new = pipage_step(st_, s)
    assert sum(new.weights.values()) == sum(st_.weights.values())


def test_integral_weights_fixed():
    inst = path2(F(1), F(0))
    for seed in range(5):
        assert dependent_round(inst, seed).bits.tolist() == [[1, 0]]


def test_fig1_layer3_degree(fig1):
    layer = WeightedBipartiteInstance(fig1.graph, (fig1.weights[2],))
    for seed in range(200):
        assert dependent_round(layer, seed).degree("v1", 1) in (1, 2)


def test_exact_marginals_and_degrees(rng):
    for _ in range(40):
        inst = random_instance(rng, max_side=3, max_den=6)
        if sum(1 for w in inst.weights[0] if 0 < w < 1) > 8:
            continue
        dist = exact_distribution(inst)
        assert sum(dist.values()) == 1
        for k, w in enumerate(inst.weights[0]):
            assert sum(p for o, p in dist.items() if o[k]) == w


def test_batch_matches_single(fig1, rng):
    inst = random_instance(rng)
    seeds = np.arange(50, dtype=np.uint64)
    bits = dependent_round_batch(inst, seeds)
    for s in range(50):
        assert bits[s].tolist() == dependent_round(inst, s).bits[0].tolist()


def test_deterministic_in_seed():
    inst = star_instance([[F(1, 3)] * 3], ["x", "y", "z"])
    assert dependent_round(inst, 42).bits.tolist() == dependent_round(inst, 42).bits.tolist()
    assert run_to_completion(PipageState.start(inst, 42)).step <= 3


def test_rejects_multistep(fig1):
    with pytest.raises(InstanceError):
        dependent_round(fig1, 0)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32), st.integers(0, 2**64 - 1))
def test_degree_preservation_property(inst_seed, seed):
    inst = random_instance(np.random.default_rng(inst_seed))
    out = dependent_round(inst, seed)
    D = out.degrees()[0]
    for j, v in enumerate(inst.graph.nodes):
        d = sum(inst.weights[0][e] for e in inst.graph.incident_edges(v))
        assert int(d) <= D[j] <= -(-d.numerator // d.denominator)
