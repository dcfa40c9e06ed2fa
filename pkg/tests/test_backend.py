import json
import os
import subprocess
import sys

SCRIPT = r"""
import json
import numpy as np
from fractions import Fraction
from randapport import backend, profile
from randapport.bipartite import WeightedBipartiteInstance
from randapport.cumulative import cumulative_round_batch
from randapport.methods import poisson_batch, seat_sequence_batch

inst = WeightedBipartiteInstance.from_weight_lists(
    ["v1", "v2"], ["v3", "v4"],
    [("v1", "v3", ["1/4", "1/2", "3/4"]), ("v1", "v4", ["1/2", "1/4", "3/4"]), ("v2", "v4", ["1/2", "1/2", "1/4"])],
)
seeds = np.arange(40, dtype=np.uint64)
print(json.dumps({
    "backend": backend(),
    "cumulative": cumulative_round_batch(inst, seeds).tolist(),
    "sequences": seat_sequence_batch(profile(3, 2, 2), seeds).tolist(),
    "poisson": poisson_batch(profile(3, 2, 2), 4, seeds).tolist(),
}))
"""


def run(disable):
    env = dict(os.environ)
    env.pop("RANDAPPORT_DISABLE_NUMBA", None)
    if disable:
        env["RANDAPPORT_DISABLE_NUMBA"] = "1"
    proc = subprocess.run([sys.executable, "-c", SCRIPT], env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def test_fallback_matches_compiled():
    fast, slow = run(False), run(True)
    assert slow["backend"] == "python"
    for key in ("cumulative", "sequences", "poisson"):
        assert fast[key] == slow[key]
