import math
import sys

import numpy as np
import pytest

from varorbit.core import ProblemSpec, Trajectory, min_separation


def random_trajectory(seed, n=3, d=2, k=16, period=2 * math.pi, delta=0.0, alpha=1.0,
                      masses=None, min_sep=0.2, scale=1.0):
    """Seeded uniform trajectory, redrawn until every pair stays ``min_sep`` apart."""
    rng = np.random.default_rng(seed)
    masses = masses or tuple(rng.uniform(0.5, 2.0, size=n))
    spec = ProblemSpec(n, d, masses, period, k, alpha=alpha, delta=delta)
    while True:
        traj = Trajectory(scale * rng.uniform(-1, 1, size=(k, n, d)), spec)
        if min_separation(traj).r >= min_sep:
            return traj


@pytest.fixture
def rand_traj():
    return random_trajectory


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    results = getattr(acceptance, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
