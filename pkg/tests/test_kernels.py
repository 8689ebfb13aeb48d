import os
import subprocess
import sys
from decimal import Decimal, getcontext

import numpy as np
import pytest

from varorbit import _backend
from varorbit._backend import get_kernels

from conftest import random_trajectory

numba_only = pytest.mark.skipif(not _backend.HAVE_NUMBA, reason="numba not installed")


def args(t):
    p = t.spec
    return p.mass_array, float(p.alpha), float(p.delta), float(p.g_const)


@numba_only
@pytest.mark.parametrize("seed,delta,alpha,d", [(0, 0.0, 1.0, 2), (1, 0.3, 1.0, 3),
                                                (2, 0.0, 1.5, 3), (3, 0.8, 2.0, 2)])
def test_backends_agree(seed, delta, alpha, d):
    t = random_trajectory(seed, n=5, d=d, k=12, delta=delta, alpha=alpha, min_sep=0.05)
    nb, npk = get_kernels("numba"), get_kernels("numpy")
    m, a, dl, g = args(t)
    j1, k1, u1, g1, b1 = nb.action(t.values, m, a, dl, g, t.spec.h)
    j2, k2, u2, g2, b2 = npk.action(t.values, m, a, dl, g, t.spec.h)
    assert b1 == b2 == -1
    assert j1 == pytest.approx(j2, rel=1e-12)
    assert k1 == pytest.approx(k2, rel=1e-12)
    assert u1 == pytest.approx(u2, rel=1e-12)
    assert np.allclose(g1, g2, rtol=1e-11, atol=1e-12 * np.max(np.abs(g1)))
    assert np.allclose(nb.segment_kinetic(t.values, m, t.spec.h),
                       npk.segment_kinetic(t.values, m, t.spec.h), rtol=1e-13)


@pytest.mark.parametrize("name", ["numpy"] + (["numba"] if _backend.HAVE_NUMBA else []))
def test_collision_code_matches(name):
    t = random_trajectory(4, n=4, k=6)
    v = t.values.copy()
    v[5, 3] = v[5, 1]
    v[2, 2] = v[2, 0]
    m, a, dl, g = args(t)
    *_, bad = get_kernels(name).action(v, m, a, dl, g, t.spec.h)
    # first coincident pair in (s, i, l) order
    assert bad == 2 * 16 + 0 * 4 + 2


def exact_action(q, masses, h):
    """Action at 60 significant digits with the decimal module (alpha=1, no cutoff)."""
    getcontext().prec = 60
    k, n, d = q.shape
    D = [[[Decimal(float(x)) for x in row] for row in node] for node in q]
    ms = [Decimal(float(m)) for m in masses]
    hd = Decimal(float(h))
    kin = Decimal(0)
    u = Decimal(0)
    for s in range(k):
        for i in range(n):
            kin += ms[i] * sum((D[(s + 1) % k][i][c] - D[s][i][c]) ** 2 for c in range(d))
            for l in range(i + 1, n):
                r2 = sum((D[s][i][c] - D[s][l][c]) ** 2 for c in range(d))
                u -= ms[i] * ms[l] / r2.sqrt()
    return kin / (2 * hd) - hd * u


@pytest.mark.parametrize("name", ["numpy"] + (["numba"] if _backend.HAVE_NUMBA else []))
@pytest.mark.parametrize("scale", [1e-3, 1e-8, 1e-12])
def test_action_delta_against_high_precision(name, scale):
    t = random_trajectory(11, n=3, d=2, k=10)
    rng = np.random.default_rng(5)
    dq = scale * rng.standard_normal(t.values.shape)
    m, a, dl, g = args(t)
    dj, bad = get_kernels(name).action_delta(t.values, dq, m, a, dl, g, t.spec.h)
    assert bad == -1
    ref = float(exact_action(t.values + dq, m, t.spec.h) - exact_action(t.values, m, t.spec.h))
    assert dj == pytest.approx(ref, rel=1e-9)


@pytest.mark.parametrize("name", ["numpy"] + (["numba"] if _backend.HAVE_NUMBA else []))
def test_action_delta_with_cutoff_matches_difference(name):
    t = random_trajectory(12, n=3, d=2, k=8, delta=0.9, min_sep=0.1)
    rng = np.random.default_rng(6)
    dq = 1e-2 * rng.standard_normal(t.values.shape)
    m, a, dl, g = args(t)
    kern = get_kernels(name)
    dj, _ = kern.action_delta(t.values, dq, m, a, dl, g, t.spec.h)
    j0 = kern.action(t.values, m, a, dl, g, t.spec.h)[0]
    j1 = kern.action(t.values + dq, m, a, dl, g, t.spec.h)[0]
    assert dj == pytest.approx(j1 - j0, rel=1e-9, abs=1e-12 * abs(j0))


@pytest.mark.parametrize("env,expected", [
    ({"VAROBIT_X": "1"}, "numba" if _backend.HAVE_NUMBA else "numpy"),
    ({"VARORBIT_BACKEND": "numpy"}, "numpy"),
    ({"VARORBIT_DISABLE_NUMBA": "1"}, "numpy"),
])
def test_backend_env_flag(env, expected):
    full = {k: v for k, v in os.environ.items() if not k.startswith("VARORBIT_")}
    full.update(env)
    out = subprocess.run([sys.executable, "-c", "import varorbit; print(varorbit.BACKEND)"],
                         env=full, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == expected
