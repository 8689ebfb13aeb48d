import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from varorbit.core import (DomainError, ProblemSpec, SpecError, Trajectory, interpolate,
                           min_separation, refine)

from conftest import random_trajectory


def spec(n=2, d=2, k=4, period=4.0, **kw):
    return ProblemSpec(n, d, (1.0,) * n, period, k, **kw)


def test_h_is_derived():
    p = spec(k=8, period=2.0)
    assert p.h == 0.25
    assert p.with_k(16).h == 0.125


@pytest.mark.parametrize("kw", [
    dict(k=2), dict(period=0.0), dict(alpha=0.0), dict(delta=-1.0),
])
def test_problem_spec_rejects(kw):
    with pytest.raises(SpecError):
        spec(**kw)


def test_problem_spec_rejects_masses():
    with pytest.raises(SpecError):
        ProblemSpec(2, 2, (1.0, 0.0), 1.0, 4)
    with pytest.raises(SpecError):
        ProblemSpec(2, 2, (1.0,), 1.0, 4)


def test_trajectory_validation_and_immutability():
    p = spec()
    with pytest.raises(SpecError):
        Trajectory(np.zeros((3, 2, 2)), p)
    bad = np.zeros(p.shape)
    bad[1, 0, 0] = np.nan
    with pytest.raises(SpecError):
        Trajectory(bad, p)
    t = Trajectory(np.zeros(p.shape), p)
    with pytest.raises(ValueError):
        t.values[0, 0, 0] = 1.0


def test_node_index_wraps_exactly():
    t = random_trajectory(1, k=7)
    for s in range(-7, 14):
        assert np.array_equal(t.node(s + 7), t.node(s))


def test_interpolate_constant():
    p = spec(k=5, period=3.0)
    c = np.array([[1.5, -2.0], [0.25, 4.0]])
    t = Trajectory(np.broadcast_to(c, p.shape), p)
    for time in np.linspace(0, 3.0, 17):
        assert np.allclose(interpolate(t, time), c, rtol=0, atol=1e-15)


def test_interpolate_reproduces_nodes_exactly():
    t = random_trajectory(3, k=9, period=2.7)
    for s in range(9):
        assert np.array_equal(interpolate(t, s * t.spec.h), t.values[s])
    assert np.array_equal(interpolate(t, t.spec.period), t.values[0])


def test_interpolate_midpoint():
    # node values 0 then 2 on consecutive nodes; halfway along the segment -> 1
    p = ProblemSpec(1, 1, (1.0,), 3.0, 3)
    t = Trajectory(np.array([[[0.0]], [[2.0]], [[7.0]]]), p)
    assert interpolate(t, 0.5)[0, 0] == pytest.approx(1.0, abs=1e-15)
    # closing segment from the last node back to node 0
    assert interpolate(t, 2.5)[0, 0] == pytest.approx(3.5, abs=1e-15)


def test_interpolate_domain():
    t = random_trajectory(0)
    with pytest.raises(DomainError):
        interpolate(t, -1e-9)
    with pytest.raises(DomainError):
        interpolate(t, t.spec.period * (1 + 1e-12))


def test_min_separation_constant_distance():
    p = spec(k=6)
    v = np.zeros(p.shape)
    v[:, 1, 0] = 3.0
    assert min_separation(Trajectory(v, p)).r == 3.0


def test_min_separation_detects_coincidence():
    t = random_trajectory(2, k=6)
    v = t.values.copy()
    v[4, 2] = v[4, 0]
    sep = min_separation(t.replace(v))
    assert (sep.s, sep.i, sep.l, sep.r) == (4, 0, 2, 0.0)


def test_min_separation_equilateral_tie_break():
    a = 1.7
    p = ProblemSpec(3, 2, (1, 1, 1), 1.0, 5)
    tri = np.array([[0, 0], [a, 0], [a / 2, a * math.sqrt(3) / 2]])
    sep = min_separation(Trajectory(np.broadcast_to(tri, p.shape), p))
    assert (sep.s, sep.i, sep.l) == (0, 0, 1)
    assert sep.r == pytest.approx(a, rel=1e-15)


def test_min_separation_needs_two_bodies():
    p = ProblemSpec(1, 2, (1.0,), 1.0, 3)
    with pytest.raises(DomainError):
        min_separation(Trajectory(np.zeros(p.shape), p))


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10**6), shift=st.lists(st.floats(-100, 100), min_size=2, max_size=2))
def test_min_separation_translation_invariant(seed, shift):
    t = random_trajectory(seed, k=5)
    moved = t.replace(t.values + np.array(shift))
    assert min_separation(moved).r == pytest.approx(min_separation(t).r, rel=1e-9, abs=1e-12)


def test_refine_keeps_nodes_and_polygon():
    t = random_trajectory(5, k=8)
    f = refine(t, 2)
    assert f.k == 16 and f.spec.period == t.spec.period
    assert np.array_equal(f.values[::2], t.values)
    for time in np.linspace(0, t.spec.period, 23):
        assert np.allclose(interpolate(f, time), interpolate(t, time), atol=1e-13)
