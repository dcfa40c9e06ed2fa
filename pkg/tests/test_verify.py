from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from randapport.core import Apportionment, PopulationProfile, profile, standard_quota
from randapport.cumulative import star_instance
from randapport.methods import HouseMonotoneMethod, grimmett
from randapport.verify import (
    bijection_sweep,
    check_flow_network,
    enumerate_quota_allocations,
    exact_negcorr,
    hunt_alabama,
    hunt_huntington_hill_quota,
    is_toxic,
    monotone_successors,
    quota_sequences,
    recheck_alabama,
    recheck_quota_violation,
    run_suite,
    stat_exante,
    stat_marginals,
    stat_negcorr,
    stat_rounding_marginals,
    toxicity_witness,
    verify_bijection,
    verify_pitfall_example2,
    verify_theorem1,
)
from randapport.verify.quota import in_quota

F = Fraction


def brute_quota(prof, h):
    q = standard_quota(prof, h).values
    ranges = [range(int(x), -(-x.numerator // x.denominator) + 1) for x in q]
    return sorted(a for a in product(*ranges) if sum(a) == h)


@pytest.mark.parametrize("pops,h", [((1, 1), 2), ((1, 2, 1, 2), 2), ((824, 44, 44, 44, 222), 10), ((3, 5, 7), 4)])
def test_quota_enumeration_complete(pops, h):
    prof = PopulationProfile(pops)
    got = sorted(a.seats for a in enumerate_quota_allocations(prof, h).allocations)
    assert got == brute_quota(prof, h)


def test_quota_examples():
    assert [a.seats for a in enumerate_quota_allocations(profile(1, 1), 2).allocations] == [(1, 1)]
    pb = enumerate_quota_allocations(profile(824, 44, 44, 44, 222), 10).allocations
    assert {a.seats[0] for a in pb} <= {6, 7}
    assert (1, 0, 1, 0) in [a.seats for a in enumerate_quota_allocations(profile(1, 2, 1, 2), 2).allocations]
    with pytest.raises(ValueError):
        enumerate_quota_allocations(PopulationProfile(tuple([1] * 21)), 3)


def test_theorem1():
    cert = verify_theorem1()
    assert cert["certified"] and cert["escaped"] == []
    assert cert["count"] == len(enumerate_quota_allocations(profile(824, 44, 44, 44, 44), 10).allocations)
    by_alloc = {tuple(c["allocation"]): c for c in cert["cases"]}
    assert by_alloc[(9, 0, 0, 0, 1)]["against"] == "B"
    assert by_alloc[(8, 0, 0, 1, 1)]["against"] == "C"
    assert all(r["paradox"] for c in cert["cases"] for r in c["responses"])


def test_toxicity_examples():
    assert is_toxic(profile(1, 2, 1, 2), 2, Apportionment((1, 0, 1, 0), 2))
    assert not is_toxic(profile(45, 25, 15, 15), 3, Apportionment((2, 1, 0, 0), 3))
    assert not is_toxic(profile(2, 1, 3), 6, Apportionment((2, 1, 3), 6))
    with pytest.raises(ValueError):
        is_toxic(profile(1, 2, 1, 2), 2, Apportionment((2, 0, 0, 0), 2))


def test_toxicity_witness_is_quota_sequence():
    prof = profile(2, 1, 3)
    w = toxicity_witness(prof, 2, Apportionment((1, 0, 1), 2))
    assert w is not None and len(w) == prof.total
    assert tuple(w) in set(quota_sequences(prof))


def test_sampled_allocations_never_toxic():
    for pops in ((1, 2, 1, 2), (3, 2, 1), (2, 5)):
        prof = PopulationProfile(pops)
        for seed in range(40):
            m = HouseMonotoneMethod(seed)
            for h in range(1, prof.total + 1):
                assert not is_toxic(prof, h, m(prof, h))


def test_example2():
    cert = verify_pitfall_example2()
    assert cert["certified"]
    assert cert["max_expected"] == F(7, 4) < F(9, 5)
    assert monotone_successors(profile(45, 25, 15, 15), 3, (1, 0, 1, 1)) == [(1, 1, 1, 1)]
    assert check_flow_network() == []


def test_quota_sequences_p111():
    seqs = list(quota_sequences(profile(1, 1, 1)))
    assert len(seqs) == 6 and all(sorted(s) == [0, 1, 2] for s in seqs)
    for s in quota_sequences(profile(1, 3)):
        counts = [0, 0]
        for h, i in enumerate(s, 1):
            counts[i] += 1
            assert in_quota(profile(1, 3), h, counts)


def test_bijection_examples():
    r = verify_bijection(profile(1, 1))
    assert r["certified"] and r["sequences"] == r["matchings"] == 2
    assert verify_bijection(profile(1, 2, 1, 2))["certified"]
    assert verify_bijection(profile(1, 1, 1))["sequences"] == 6
    with pytest.raises(ValueError):
        verify_bijection(profile(6, 5))


def test_bijection_sweep():
    cert = bijection_sweep()
    assert cert["certified"] and cert["profiles"] == 84


def test_hunters():
    w = hunt_alabama()
    assert w is not None and recheck_alabama(w)
    v = hunt_huntington_hill_quota()
    assert v is not None and recheck_quota_violation(v)


def test_stats_reports(fig1):
    rep = stat_exante(grimmett, profile(1, 1), 1, 20_000, 0)
    assert rep.passed and rep.samples == 20_000
    rep = stat_rounding_marginals(fig1, 20_000, 1)
    assert rep.passed
    assert rep.targets[0] == 0.25
    deg = stat_marginals(lambda s: np.ones((len(s), 1)), [1], 1000, 0)
    assert deg.estimates == [1.0] and deg.std_errors == [0.0] and deg.passed
    with pytest.raises(ValueError):
        stat_marginals(lambda s: np.ones((len(s), 1)), [1], 999, 0)


def test_stats_reproducible():
    a = stat_exante(grimmett, profile(2, 3), 2, 2000, 5).to_json()
    b = stat_exante(grimmett, profile(2, 3), 2, 2000, 5).to_json()
    assert a == b


def test_stats_detect_bias():
    rep = stat_marginals(lambda s: (np.arange(len(s)) % 10 == 0)[:, None], [0.5], 2000, 0)
    assert not rep.passed and rep.failures()


def test_negcorr():
    inst = star_instance([[F(1, 3), F(1, 3), F(1, 3)]], ["x", "y", "z"])
    assert stat_negcorr(inst, 20_000, 0).passed
    assert exact_negcorr(inst) == []


def test_run_suite_unknown():
    with pytest.raises(ValueError):
        run_suite("nope")
