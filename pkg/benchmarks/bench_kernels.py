"""Timing of the numba kernels against the pure-numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 20]

Times the action-plus-gradient kernel and the step-difference kernel on
random collision-free trajectories of a few sizes, then one short
minimization per backend.
"""
import argparse
import math
import os
import subprocess
import sys
import timeit

import numpy as np

from varorbit import _backend
from varorbit.core import ProblemSpec

SIZES = [(3, 2, 60), (3, 3, 240), (8, 3, 120), (20, 3, 64)]


def sample(n, d, k, seed=0):
    rng = np.random.default_rng(seed)
    # spread bodies on distinct shells so no pair comes close
    base = rng.standard_normal((n, d))
    base *= (1.0 + np.arange(n))[:, None] / np.linalg.norm(base, axis=1)[:, None]
    q = base[None] + 0.1 * rng.standard_normal((k, n, d))
    return ProblemSpec(n, d, tuple(rng.uniform(0.5, 2.0, n)), 2 * math.pi, k), q


def bench_kernels(names, repeat):
    print(f"{'N':>3} {'d':>2} {'k':>4}  " + "  ".join(f"{n + ' action':>14} {n + ' delta':>14}" for n in names))
    for n, d, k in SIZES:
        p, q = sample(n, d, k)
        dq = 1e-3 * np.random.default_rng(1).standard_normal(q.shape)
        cols = []
        for name in names:
            kern = _backend.get_kernels(name)
            args = (p.mass_array, 1.0, 0.05, 1.0, p.h)
            kern.action(q, *args)              # compile / warm up
            kern.action_delta(q, dq, *args)
            t_act = min(timeit.repeat(lambda: kern.action(q, *args), number=1, repeat=repeat))
            t_del = min(timeit.repeat(lambda: kern.action_delta(q, dq, *args), number=1, repeat=repeat))
            cols.append(f"{t_act * 1e6:>11.1f} us {t_del * 1e6:>11.1f} us")
        print(f"{n:>3} {d:>2} {k:>4}  " + "  ".join(cols))


MINIMIZE = """
import math, time
from varorbit import BACKEND, ProblemSpec, SymmetrySpec, OptimizerConfig, minimize, random_init
p = ProblemSpec(3, 2, (1.0, 1.0, 1.0), 2 * math.pi, 60, delta=0.05)
sym = SymmetrySpec.radial(2)
cfg = OptimizerConfig(max_iters=1)
minimize(random_init(p, sym, 0), p, sym, cfg)
t0 = time.perf_counter()
_, rep = minimize(random_init(p, sym, 0), p, sym, OptimizerConfig(max_iters=500))
print(f"minimize 500 iterations ({BACKEND}): {time.perf_counter() - t0:.3f} s, J={rep.j:.10g}")
"""


def bench_minimize(names):
    """End-to-end optimizer timing, one subprocess per backend (selected by env flag)."""
    for name in names:
        env = {k: v for k, v in os.environ.items() if not k.startswith("VARORBIT_")}
        env["VARORBIT_BACKEND"] = name
        out = subprocess.run([sys.executable, "-c", MINIMIZE], env=env, capture_output=True,
                             text=True, check=True)
        print(out.stdout.strip())


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args()
    names = ["numba", "numpy"] if _backend.HAVE_NUMBA else ["numpy"]
    bench_kernels(names, args.repeat)
    bench_minimize(names)


if __name__ == "__main__":
    main()
