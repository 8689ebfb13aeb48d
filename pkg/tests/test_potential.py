import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from varorbit.core import ProblemSpec, SingularityError, Trajectory
from varorbit.potential import (cutoff_phi, pair_force, pair_potential, regularized_pair_force,
                                regularized_pair_potential, total_potential)

from conftest import random_trajectory


def test_pair_potential_examples():
    assert pair_potential(1.0, 1, 1, 1) == -1.0
    assert pair_potential(2.0, 1, 4, 1) == -2.0
    assert pair_potential(2.0, 1, 1, 2) == -0.25


def test_pair_potential_singular():
    with pytest.raises(SingularityError):
        pair_potential(0.0, 1, 1, 1)
    with pytest.raises(SingularityError):
        pair_force([0.0, 0.0], 1, 1, 1)


def test_pair_force_examples():
    assert np.allclose(pair_force([1.0, 0.0], 1, 1, 1), [1.0, 0.0], rtol=0, atol=1e-15)
    assert np.allclose(pair_force([0.0, 2.0], 1, 1, 1), [0.0, 0.25], rtol=0, atol=1e-15)


@settings(max_examples=100, deadline=None)
@given(diff=st.lists(st.floats(-5, 5), min_size=3, max_size=3).filter(
    lambda v: np.linalg.norm(v) > 1e-3),
       mi=st.floats(0.1, 5), ml=st.floats(0.1, 5), alpha=st.floats(0.5, 3))
def test_pair_force_odd(diff, mi, ml, alpha):
    d = np.array(diff)
    assert np.array_equal(pair_force(-d, mi, ml, alpha), -pair_force(d, mi, ml, alpha))


def fd_grad(f, x, rel=1e-6):
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    step = rel * max(1.0, float(np.linalg.norm(x)))
    for n in range(x.size):
        e = np.zeros_like(x)
        e.flat[n] = step
        g.flat[n] = (f(x + e) - f(x - e)) / (2 * step)
    return g


@settings(max_examples=100, deadline=None)
@given(diff=st.lists(st.floats(-3, 3), min_size=2, max_size=3).filter(
    lambda v: np.linalg.norm(v) > 0.05),
       mi=st.floats(0.2, 3), ml=st.floats(0.2, 3), alpha=st.floats(0.5, 3))
def test_pair_force_matches_finite_differences(diff, mi, ml, alpha):
    d = np.array(diff)
    fd = fd_grad(lambda x: pair_potential(np.linalg.norm(x), mi, ml, alpha), d)
    an = pair_force(d, mi, ml, alpha)
    assert np.allclose(fd, an, rtol=1e-6, atol=1e-6 * np.max(np.abs(an)))


@settings(max_examples=100, deadline=None)
@given(r=st.floats(0.02, 0.6), theta=st.floats(0, 2 * math.pi), delta=st.floats(0.1, 0.5))
def test_regularized_force_matches_finite_differences(r, theta, delta):
    # stay away from the cutoff branch points, where the value is only C1
    assume_far = min(abs(r - delta), abs(r - delta / 2)) > 1e-4
    if not assume_far:
        return
    d = r * np.array([math.cos(theta), math.sin(theta)])
    f = lambda x: regularized_pair_potential(np.linalg.norm(x), 1.0, 2.0, 1.0, delta)
    fd = fd_grad(f, d, rel=1e-7)
    an = regularized_pair_force(d, 1.0, 2.0, 1.0, delta)
    assert np.allclose(fd, an, rtol=1e-6, atol=1e-6 * np.max(np.abs(an)))


def test_cutoff_examples():
    delta = 0.4
    assert cutoff_phi(delta / 2, delta) == (1.0, 0.0)
    assert cutoff_phi(3 * delta / 4, delta)[0] == pytest.approx(0.5, abs=1e-15)
    assert cutoff_phi(2 * delta, delta) == (0.0, 0.0)


@settings(max_examples=200, deadline=None)
@given(r=st.floats(0.0, 1.0), delta=st.floats(0.01, 1.0))
def test_cutoff_range_and_derivative(r, delta):
    v, dv = cutoff_phi(r, delta)
    assert 0.0 <= v <= 1.0
    assert dv <= 0.0
    if delta / 2 < r < delta and min(r - delta / 2, delta - r) > 1e-6 * delta:
        eps = 1e-7 * delta
        fd = (cutoff_phi(r + eps, delta)[0] - cutoff_phi(r - eps, delta)[0]) / (2 * eps)
        assert fd == pytest.approx(dv, rel=1e-5, abs=1e-6 / delta)


def test_regularized_examples():
    assert regularized_pair_potential(0.5, 1, 1, 1, 0.4) == pair_potential(0.5, 1, 1, 1)
    # r = delta/4: cutoff fully on, -1/r - 1/r^2 = -10 - 100
    assert regularized_pair_potential(0.1, 1, 1, 1, 0.4) == pytest.approx(-110.0, rel=1e-14)


@pytest.mark.parametrize("edge", [0.5, 1.0])
def test_regularized_continuity(edge):
    delta = 0.3
    r = edge * delta
    lo = regularized_pair_potential(r * (1 - 1e-13), 1, 1, 1, delta)
    hi = regularized_pair_potential(r * (1 + 1e-13), 1, 1, 1, delta)
    assert abs(hi - lo) < 1e-10


@settings(max_examples=200, deadline=None)
@given(r=st.floats(1e-3, 10), delta=st.floats(1e-3, 2), alpha=st.floats(0.5, 3))
def test_regularized_below_plain(r, delta, alpha):
    assert regularized_pair_potential(r, 1, 1, alpha, delta) <= pair_potential(r, 1, 1, alpha)


def brute_total(traj):
    """Independent oracle: double loop over ordered pairs with the scalar pair functions."""
    p = traj.spec
    u, grad = 0.0, np.zeros(p.shape)
    for s in range(p.k):
        for i in range(p.n_bodies):
            for l in range(p.n_bodies):
                if i == l:
                    continue
                diff = traj.values[s, i] - traj.values[s, l]
                r = np.linalg.norm(diff)
                if p.delta > 0:
                    u += 0.5 * regularized_pair_potential(r, p.masses[i], p.masses[l], p.alpha, p.delta)
                    grad[s, i] += regularized_pair_force(diff, p.masses[i], p.masses[l], p.alpha, p.delta)
                else:
                    u += 0.5 * pair_potential(r, p.masses[i], p.masses[l], p.alpha)
                    grad[s, i] += pair_force(diff, p.masses[i], p.masses[l], p.alpha)
    return u, grad


@pytest.mark.parametrize("seed,delta,alpha,d", [(0, 0.0, 1.0, 2), (1, 0.0, 1.7, 3),
                                                (2, 0.6, 1.0, 2), (3, 0.9, 2.0, 3)])
def test_total_potential_matches_brute_force(seed, delta, alpha, d):
    t = random_trajectory(seed, n=4, d=d, k=7, delta=delta, alpha=alpha, min_sep=0.05)
    got = total_potential(t)
    u, grad = brute_total(t)
    assert got.u_hat == pytest.approx(u, rel=1e-13)
    assert np.allclose(got.grad, grad, rtol=1e-12, atol=1e-12 * np.max(np.abs(grad)))


def test_total_potential_examples():
    p = ProblemSpec(2, 2, (1, 1), 10.0, 10)
    v = np.zeros(p.shape)
    v[:, 1, 0] = 1.0
    assert total_potential(Trajectory(v, p)).u_hat == pytest.approx(-10.0, rel=1e-15)

    p3 = ProblemSpec(3, 2, (1, 1, 1), 1.0, 3)
    tri = np.array([[0, 0], [1, 0], [0.5, math.sqrt(3) / 2]])
    tot = total_potential(Trajectory(np.broadcast_to(tri, p3.shape), p3))
    assert tot.node_values[0] == pytest.approx(-3.0, rel=1e-15)


def test_total_potential_collision_reports_pair():
    t = random_trajectory(4, n=3, k=5)
    v = t.values.copy()
    v[3, 2] = v[3, 1]
    with pytest.raises(SingularityError) as info:
        total_potential(t.replace(v))
    sep = info.value.separation
    assert (sep.s, sep.i, sep.l, sep.r) == (3, 1, 2, 0.0)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_gradient_sums_to_zero_per_node(seed):
    t = random_trajectory(seed, n=4, k=6, delta=0.3, min_sep=0.05)
    g = total_potential(t).grad
    scale = np.max(np.abs(g))
    assert np.all(np.abs(g.sum(axis=1)) <= 1e-12 * scale)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6), angle=st.floats(0, 2 * math.pi))
def test_rotation_and_permutation_invariance(seed, angle):
    t = random_trajectory(seed, n=3, k=5, masses=(1.0, 1.0, 1.0))
    base = total_potential(t)
    c, s = math.cos(angle), math.sin(angle)
    rot = np.array([[c, -s], [s, c]])
    rotated = total_potential(t.replace(t.values @ rot.T))
    assert rotated.u_hat == pytest.approx(base.u_hat, rel=1e-12)
    assert np.allclose(rotated.grad, base.grad @ rot.T, atol=1e-10 * np.max(np.abs(base.grad)))
    perm = total_potential(t.replace(t.values[:, [2, 0, 1]]))
    assert perm.u_hat == pytest.approx(base.u_hat, rel=1e-12)


def test_potential_decreases_as_pair_approaches():
    p = ProblemSpec(3, 2, (1.0, 2.0, 0.5), 1.0, 3)
    last = -math.inf
    for x in np.linspace(3.0, 0.1, 40):
        v = np.zeros(p.shape)
        v[:, 1, 0] = x
        v[:, 2] = [5.0, 5.0]
        u = total_potential(Trajectory(v, p)).u_hat
        assert u < last or last == -math.inf
        last = u if last == -math.inf else last
        last = u
    assert math.isfinite(last)
