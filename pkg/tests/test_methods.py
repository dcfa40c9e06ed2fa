import math
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from randapport.core import (
    PopulationProfile,
    check_house_monotone_step,
    check_quota,
    detect_population_paradox,
    profile,
    standard_quota,
)
from randapport.cumulative import audit_outcome
from randapport.methods import (
    HUNTINGTON_HILL,
    DivisorCriterion,
    FixedArrivals,
    HouseMonotoneMethod,
    cumulative_star_outcome,
    divisor,
    grimmett,
    grimmett_with,
    hamilton,
    house_monotone_method,
    huntington_hill,
    poisson_batch,
    poisson_method,
    poisson_with,
    sample_finite_seat_sequence,
    seat_sequence_batch,
)
from randapport.verify.quota import quota_sequences

F = Fraction


def brute_hamilton(prof, h):
    # independent: the allocation maximizing residues, lexicographically first
    q = standard_quota(prof, h).values
    base = [math.floor(x) for x in q]
    r = h - sum(base)
    best = None
    for extra in product((0, 1), repeat=prof.n):
        if sum(extra) != r:
            continue
        key = (sum(x - b for x, b, e in zip(q, base, extra) if e), tuple(extra))
        if best is None or key > best[0]:
            best = (key, extra)
    return tuple(b + e for b, e in zip(base, best[1]))


def test_hamilton_examples():
    assert hamilton(profile(1, 2, 1, 2), 3).seats == (1, 1, 0, 1)
    assert hamilton(profile(824, 44, 44, 44, 44), 10).seats == (8, 1, 1, 0, 0)
    assert hamilton(profile(3, 6, 9), 6).seats == (1, 2, 3)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(1, 30), min_size=2, max_size=5), st.integers(1, 20))
def test_hamilton_matches_brute_force(pops, h):
    prof = PopulationProfile(tuple(pops))
    assert hamilton(prof, h).seats == brute_hamilton(prof, h)
    assert check_quota(prof, h, hamilton(prof, h))


def test_huntington_hill_examples():
    assert huntington_hill(profile(6, 1), 3).seats == (2, 1)
    assert huntington_hill(profile(10, 10), 2).seats == (1, 1)
    assert huntington_hill(profile(7, 3, 5, 2), 4).seats == (1, 1, 1, 1)


def test_divisor_criterion_validation():
    bad = DivisorCriterion("bad", lambda t: t + 2, lambda t: F((t + 2) ** 2))
    with pytest.raises(ValueError):
        divisor(profile(1, 2), 3, bad)
    HUNTINGTON_HILL.check(50)


def test_grimmett_paper_example():
    assert grimmett_with(profile(1, 2, 1, 2), 2, [0, 1, 2, 3], F(7, 10)).seats == (1, 0, 1, 0)


def test_grimmett_two_states():
    prof = profile(1, 1)
    assert grimmett_with(prof, 1, [0, 1], F(3, 5)).seats == (1, 0)
    assert grimmett_with(prof, 1, [0, 1], F(2, 5)).seats == (0, 1)
    assert grimmett_with(prof, 1, [0, 1], F(1, 2)).seats == (0, 1)


def test_grimmett_integer_quotas():
    prof = profile(2, 4, 6)
    for perm in ([0, 1, 2], [2, 0, 1]):
        for U in (F(0), F(1, 3), F(99, 100)):
            assert grimmett_with(prof, 6, perm, U).seats == (1, 2, 3)


def test_grimmett_quota_always():
    prof = profile(5, 3, 2, 7)
    for seed in range(300):
        assert check_quota(prof, 9, grimmett(prof, 9, seed))


def test_poisson_fixed_streams():
    streams = [FixedArrivals([1.0, 2.0]), FixedArrivals([0.9, 1.5, 2.1])]
    assert poisson_with(profile(10, 30), 3, streams).seats == (0, 3)


def test_poisson_alternation():
    base = [float(k) for k in range(1, 40)]
    streams = [FixedArrivals([x - 0.5 for x in base]), FixedArrivals(base)]
    for h in range(1, 30):
        assert poisson_with(profile(1, 1), h, streams).seats == ((h + 1) // 2, h // 2)


def test_poisson_house_step_and_scale():
    prof = profile(3, 5, 8)
    for seed in range(30):
        a = poisson_method(prof, 6, seed).seats
        b = poisson_method(prof, 7, seed).seats
        diff = [y - x for x, y in zip(a, b)]
        assert sorted(diff) == [0, 0, 1]
        assert poisson_method(profile(6, 10, 16), 6, seed).seats == a


def test_poisson_batch_matches_single():
    prof = profile(4, 1, 9)
    seeds = np.arange(200, dtype=np.uint64)
    got = poisson_batch(prof, 5, seeds)
    for s in range(200):
        assert tuple(got[s]) == poisson_method(prof, 5, s).seats


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.integers(1, 20), min_size=2, max_size=4),
    st.lists(st.integers(1, 20), min_size=4, max_size=4),
    st.integers(1, 15),
    st.integers(1, 15),
    st.integers(0, 2**64 - 1),
)
def test_poisson_no_population_paradox(p1, p2, h1, h2, seed):
    a = PopulationProfile(tuple(p1))
    b = PopulationProfile(tuple(p2[: len(p1)]))
    m = poisson_method
    assert detect_population_paradox((a, h1, m(a, h1, seed)), (b, h2, m(b, h2, seed))) is None


def test_house_monotone_full_multiple():
    prof = profile(3, 1, 2)
    for seed in range(20):
        for k in (1, 2, 3):
            assert house_monotone_method(prof, 6 * k, seed).seats == (3 * k, k, 2 * k)


def test_house_monotone_sequences_p11():
    seen = {sample_finite_seat_sequence(profile(1, 1), s).entries for s in range(40)}
    assert seen == {(0, 1), (1, 0)}


def test_sequences_are_quota_sequences():
    for pops in ((1, 3), (2, 1, 2)):
        prof = PopulationProfile(pops)
        allowed = set(quota_sequences(prof))
        for s in range(60):
            assert sample_finite_seat_sequence(prof, s).entries in allowed


def test_house_monotone_steps_and_quota():
    prof = profile(2, 3, 1)
    for seed in range(15):
        m = HouseMonotoneMethod(seed)
        prev = None
        for h in range(1, 19):
            a = m(prof, h)
            assert check_quota(prof, h, a)
            if prev is not None:
                assert check_house_monotone_step(prof, h - 1, prev, a)
            prev = a
        assert m.clone()(prof, 11) == m(prof, 11)


def test_hmax_mode():
    m = HouseMonotoneMethod(1, h_max=4)
    assert sum(m(profile(5, 7), 4).seats) == 4
    with pytest.raises(ValueError):
        m(profile(5, 7), 5)


def test_position_marginal_p22():
    seq = seat_sequence_batch(profile(2, 2), np.arange(20_000, dtype=np.uint64))
    est = (seq[:, 0] == 0).mean()
    assert abs(est - 0.5) <= 4 * math.sqrt(0.25 / 20_000)


def test_batch_matches_single_sequence():
    prof = profile(2, 1, 3)
    seq = seat_sequence_batch(prof, np.arange(20, dtype=np.uint64))
    for s in range(20):
        assert tuple(seq[s]) == sample_finite_seat_sequence(prof, s).entries


def test_star_outcome_audit():
    prof = profile(2, 3)
    for s in range(10):
        inst, out = cumulative_star_outcome(prof, s)
        assert audit_outcome(inst, out) == []
        assert tuple(out.bits.argmax(axis=1)) == sample_finite_seat_sequence(prof, s).entries
