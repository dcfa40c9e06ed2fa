from fractions import Fraction

import numpy as np
import pytest

from randapport.bipartite import WeightedBipartiteInstance


def fig1_instance():
    return WeightedBipartiteInstance.from_weight_lists(
        ["v1", "v2"],
        ["v3", "v4"],
        [
            ("v1", "v3", ["1/4", "1/2", "3/4"]),
            ("v1", "v4", ["1/2", "1/4", "3/4"]),
            ("v2", "v4", ["1/2", "1/2", "1/4"]),
        ],
    )


def random_instance(rng, T=1, max_side=5, p_edge=0.5, max_den=12):
    """Random bipartite instance; weights k/den with den uniform in 1..max_den."""
    na = int(rng.integers(1, max_side + 1))
    nb = int(rng.integers(1, max_side + 1))
    A = [f"a{i}" for i in range(na)]
    B = [f"b{j}" for j in range(nb)]
    edges = []
    for a in A:
        for b in B:
            if rng.random() < p_edge:
                ws = []
                for _ in range(T):
                    den = int(rng.integers(1, max_den + 1))
                    ws.append(Fraction(int(rng.integers(0, den + 1)), den))
                edges.append((a, b, ws))
    if not edges:
        edges.append((A[0], B[0], [Fraction(1, 2)] * T))
    return WeightedBipartiteInstance.from_weight_lists(A, B, edges, T=T)


@pytest.fixture
def fig1():
    return fig1_instance()


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# one summary line per acceptance criterion, printed at the end of the run
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def acceptance(request):
    """Record the outcome of one acceptance criterion: ``acceptance(n, ok, detail)``."""

    def record(n, ok, detail):
        ACCEPTANCE[n] = (bool(ok), detail)
        assert ok, f"criterion {n}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"AC{n:<2d} {'PASS' if ok else 'FAIL'}  {detail}")
