from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from randapport.core import (
    Apportionment,
    PopulationProfile,
    SeatSequence,
    check_house_monotone_step,
    check_quota,
    check_sequence_quota,
    detect_population_paradox,
    format_rational,
    parse_rational,
    profile,
    seat_sequence_prefix_allocation,
    standard_quota,
)


def test_quota_census_example():
    P = 331108434
    prof = PopulationProfile((20215751, P - 20215751))
    q = standard_quota(prof, 435)[0]
    assert round(float(q), 2) == 26.56
    assert sum(standard_quota(prof, 435).values) == 435


def test_table1_quotas():
    q = standard_quota(profile(824, 44, 44, 44, 44), 10)
    assert q.values == (Fraction(824, 100), *[Fraction(44, 100)] * 4)
    assert q.house == 10


@given(st.lists(st.integers(1, 1000), min_size=2, max_size=8), st.integers(1, 500))
def test_quota_sums_to_house(pops, h):
    assert sum(standard_quota(PopulationProfile(tuple(pops)), h).values) == h


def test_profile_rejects_bad_input():
    with pytest.raises(ValueError):
        PopulationProfile((5,))
    with pytest.raises(ValueError):
        PopulationProfile((1, 0))
    with pytest.raises(ValueError):
        PopulationProfile((1, True))


def test_apportionment_sum_checked():
    with pytest.raises(ValueError):
        Apportionment((1, 1), 3)
    assert Apportionment.of((2, 1)).house == 3


def test_parse_rational():
    assert parse_rational("0.187") == Fraction(187, 1000)
    assert parse_rational(" 3/4 ") == Fraction(3, 4)
    assert parse_rational(2) == 2
    with pytest.raises(TypeError):
        parse_rational(0.5)
    with pytest.raises(ValueError):
        parse_rational("abc")
    assert format_rational(Fraction(2)) == "2/1"


def test_check_quota():
    prof = profile(1, 2, 1, 2)
    assert check_quota(prof, 2, Apportionment((1, 0, 1, 0), 2))
    assert not check_quota(prof, 2, Apportionment((2, 0, 0, 0), 2))
    with pytest.raises(ValueError):
        check_quota(prof, 3, Apportionment((1, 0, 1, 0), 2))


def test_population_paradox():
    p, q = profile(10, 10), profile(10, 9)
    a, b = Apportionment((1, 1), 2), Apportionment((0, 2), 2)
    assert detect_population_paradox((p, 2, a), (q, 2, b)) == (0, 1)
    assert detect_population_paradox((p, 2, a), (q, 2, a)) is None


def test_house_monotone_step():
    prof = profile(1, 1)
    assert check_house_monotone_step(prof, 1, Apportionment((1, 0), 1), Apportionment((1, 1), 2))
    assert not check_house_monotone_step(prof, 2, Apportionment((2, 0), 2), Apportionment((1, 2), 3))


def test_seat_sequences():
    prof = profile(1, 2)
    s = SeatSequence((1, 0, 1), 2, cyclic=True)
    assert check_sequence_quota(prof, s, 9)
    assert seat_sequence_prefix_allocation(s, 7).seats == (2, 5)
    bad = SeatSequence((0, 0, 1), 2)
    assert not check_sequence_quota(prof, bad, 3)
    with pytest.raises(ValueError):
        seat_sequence_prefix_allocation(SeatSequence((0, 1), 2), 3)
    with pytest.raises(ValueError):
        SeatSequence((0, 2), 2)
