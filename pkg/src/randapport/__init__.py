"""Randomized apportionment, dependent and cumulative rounding, and small-instance verification."""

__version__ = "0.1.0"

from ._accel import backend
from .bipartite import BipartiteGraph, InstanceError, RoundingOutcome, WeightedBipartiteInstance, validate
from .core import (
    Apportionment,
    PopulationProfile,
    SeatSequence,
    StandardQuota,
    check_house_monotone_step,
    check_quota,
    check_sequence_quota,
    detect_population_paradox,
    profile,
    seat_sequence_prefix_allocation,
    standard_quota,
)
from .cumulative import audit_outcome, build_layered_graph, cumulative_round, cumulative_round_batch
from .dependent import dependent_round, dependent_round_batch
from .methods import (
    HouseMonotoneMethod,
    divisor,
    grimmett,
    grimmett_with,
    hamilton,
    house_monotone_method,
    huntington_hill,
    poisson_method,
    poisson_with,
    sample_finite_seat_sequence,
)
