"""Compare the numba kernels against the plain-Python fallback.

Each backend runs in its own subprocess because the choice is made at import
time (RANDAPPORT_DISABLE_NUMBA=1 selects the fallback). Both must produce the
same bits; the script exits non-zero if they differ.

    python3 benchmarks/bench_pipage.py [--runs N]
"""

import argparse
import hashlib
import json
import os
import subprocess
import sys
import time

WORKER = r"""
import hashlib, json, sys, time
import numpy as np
from fractions import Fraction
from randapport import backend, profile
from randapport.bipartite import WeightedBipartiteInstance
from randapport.dependent import dependent_round_batch
from randapport.methods import seat_sequence_batch

runs = int(sys.argv[1])
rng = np.random.default_rng(7)
edges = []
for a in range(5):
    for b in range(5):
        den = int(rng.integers(1, 13))
        edges.append((f"a{a}", f"b{b}", [Fraction(int(rng.integers(0, den + 1)), den)]))
dense = WeightedBipartiteInstance.from_weight_lists([f"a{i}" for i in range(5)], [f"b{i}" for i in range(5)], edges)
prof = profile(3, 2, 2, 1)

out = {"backend": backend()}
for name, fn in (
    ("dependent 5x5", lambda seeds: dependent_round_batch(dense, seeds)),
    ("house-monotone p=(3,2,2,1)", lambda seeds: seat_sequence_batch(prof, seeds)),
):
    fn(np.arange(4, dtype=np.uint64))  # compile / warm up
    seeds = np.arange(runs, dtype=np.uint64)
    t0 = time.perf_counter()
    res = fn(seeds)
    dt = time.perf_counter() - t0
    out[name] = {"seconds": dt, "digest": hashlib.sha256(np.ascontiguousarray(res).tobytes()).hexdigest()}
print(json.dumps(out))
"""


def run(backend_env, runs):
    env = dict(os.environ)
    env.pop("RANDAPPORT_DISABLE_NUMBA", None)
    env.update(backend_env)
    proc = subprocess.run([sys.executable, "-c", WORKER, str(runs)], env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--runs", type=int, default=2000)
    args = parser.parse_args()

    fast = run({}, args.runs)
    slow = run({"RANDAPPORT_DISABLE_NUMBA": "1"}, args.runs)
    same = True
    print(f"{'workload':30s} {fast['backend']:>10s} {slow['backend']:>10s} {'speedup':>8s}  runs={args.runs}")
    for name in fast:
        if name == "backend":
            continue
        f, s = fast[name], slow[name]
        ok = f["digest"] == s["digest"]
        same &= ok
        print(f"{name:30s} {f['seconds']:9.3f}s {s['seconds']:9.3f}s {s['seconds'] / f['seconds']:7.1f}x  {'same bits' if ok else 'BITS DIFFER'}")
    sys.exit(0 if same else 1)


if __name__ == "__main__":
    main()
