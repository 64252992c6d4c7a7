"""Interference kernel: numba loop vs numpy broadcast.

    python benchmarks/bench_kernels.py            # kernel timings
    python benchmarks/bench_kernels.py --sweep    # end-to-end sweep per backend

The end-to-end part runs each backend in a subprocess with
HYBRIDNET_NUMBA set, since the backend is bound at import time.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from hybridnet import _kernels


def make_case(n_victims, n_tx, seed=0):
    rng = np.random.default_rng(seed)
    return (
        rng.uniform(-100, 100, n_victims), rng.uniform(-100, 100, n_victims),
        rng.uniform(0, 360, n_victims),
        rng.uniform(-100, 100, n_tx), rng.uniform(-100, 100, n_tx), rng.uniform(0, 360, n_tx),
        np.full(n_tx, 27.0),
        rng.random((n_victims, n_tx)) < 0.9,
        np.where(rng.random((n_victims, n_tx)) < 0.2, 10.0, 0.0),
        60e9, 15.0, 15.0, 15.0, -10.0, 10.0,
    )


def best_of(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernels():
    if _kernels.interference_mw_numba is None:
        print("numba not importable; only the numpy path is available")
        return
    # compile outside the timed region
    _kernels.interference_mw_numba(*make_case(2, 2))
    print(f"{'victims':>8} {'tx':>6} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8} {'max rel diff':>13}")
    for n_v, n_t in [(10, 2), (10, 32), (100, 100), (1000, 200), (2000, 1000)]:
        args = make_case(n_v, n_t)
        repeat = 50 if n_v * n_t < 1e5 else 5
        t_np = best_of(_kernels.interference_mw_numpy, args, repeat)
        t_nb = best_of(_kernels.interference_mw_numba, args, repeat)
        a = _kernels.interference_mw_numpy(*args)
        b = _kernels.interference_mw_numba(*args)
        diff = np.max(np.abs(a - b) / np.maximum(np.abs(a), 1e-300))
        print(f"{n_v:>8} {n_t:>6} {t_np * 1e3:>10.3f} {t_nb * 1e3:>10.3f} {t_np / t_nb:>8.1f} {diff:>13.2e}")


SWEEP_SNIPPET = """
import time
from hybridnet import _kernels
from hybridnet.scenario import load_scenario
from hybridnet.sweep import SweepConfig, run_sweep
s = load_scenario('scenarios/dense.scn')
sw = SweepConfig.density(s)
run_sweep(s, sw, trials=2)
t0 = time.perf_counter()
run_sweep(s, sw, trials={trials})
print(_kernels.BACKEND, round(time.perf_counter() - t0, 2))
"""


def bench_sweep(trials):
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    for flag in ("1", "0"):
        env = dict(os.environ, HYBRIDNET_NUMBA=flag)
        out = subprocess.run(
            [sys.executable, "-c", SWEEP_SNIPPET.format(trials=trials)],
            env=env, cwd=root, capture_output=True, text=True, check=True,
        )
        backend, seconds = out.stdout.split()
        print(f"density sweep, {trials} trials/point, backend={backend}: {seconds} s")


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--sweep", action="store_true")
    ap.add_argument("--trials", type=int, default=100)
    args = ap.parse_args()
    bench_kernels()
    if args.sweep:
        bench_sweep(args.trials)
