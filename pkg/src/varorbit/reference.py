"""Analytic reference orbits and an RK4 oracle for the continuous flow."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import PairSeparation, ProblemSpec, SingularityError, Trajectory
from .potential import node_potentials


@dataclass(frozen=True)
class LagrangeOrbit:
    """Three equal masses on a rigidly rotating equilateral triangle.

    Force balance gives ``omega**2 * side**3 = 3 * G * mass``.
    """

    mass: float = 1.0
    side: float = 1.0
    g_const: float = 1.0

    @property
    def omega(self) -> float:
        return math.sqrt(3.0 * self.g_const * self.mass / self.side**3)

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega

    @property
    def radius(self) -> float:
        return self.side / math.sqrt(3.0)

    def problem(self, k: int, delta: float = 0.0) -> ProblemSpec:
        return ProblemSpec(3, 2, (self.mass,) * 3, self.period, k, alpha=1.0,
                           delta=delta, g_const=self.g_const)

    def state(self, t: float = 0.0):
        """Exact positions and velocities at time ``t``, each ``(3, 2)``."""
        ang = self.omega * t + 2.0 * math.pi * np.arange(3) / 3.0
        pos = self.radius * np.stack([np.cos(ang), np.sin(ang)], axis=1)
        vel = self.radius * self.omega * np.stack([-np.sin(ang), np.cos(ang)], axis=1)
        return pos, vel


def sample_lagrange(orbit: LagrangeOrbit, k: int) -> Trajectory:
    """Lagrange orbit sampled at ``k`` uniform nodes over one period."""
    problem = orbit.problem(k)
    s = np.arange(k)[:, None]
    ang = 2.0 * math.pi * s / k + 2.0 * math.pi * np.arange(3)[None, :] / 3.0
    values = orbit.radius * np.stack([np.cos(ang), np.sin(ang)], axis=-1)
    return Trajectory(values, problem)


@dataclass(frozen=True)
class KeplerOrbit:
    """Two-body elliptic orbit about the common centre of mass (planar)."""

    m1: float = 1.0
    m2: float = 1.0
    semi_major: float = 1.0
    eccentricity: float = 0.5
    g_const: float = 1.0

    @property
    def period(self) -> float:
        return 2.0 * math.pi * math.sqrt(self.semi_major**3 / (self.g_const * (self.m1 + self.m2)))

    def problem(self, k: int) -> ProblemSpec:
        return ProblemSpec(2, 2, (self.m1, self.m2), self.period, k, g_const=self.g_const)

    def relative(self, t):
        """Relative position ``q2 - q1`` at times ``t`` (periapsis at t=0)."""
        e = self.eccentricity
        mean = 2.0 * math.pi * np.asarray(t, dtype=float) / self.period
        ecc = mean + e * np.sin(mean)
        for _ in range(50):
            step = (ecc - e * np.sin(ecc) - mean) / (1.0 - e * np.cos(ecc))
            ecc = ecc - step
            if np.max(np.abs(step)) < 1e-15:
                break
        a = self.semi_major
        return np.stack([a * (np.cos(ecc) - e), a * math.sqrt(1.0 - e * e) * np.sin(ecc)], axis=-1)


def sample_kepler(orbit: KeplerOrbit, k: int) -> Trajectory:
    problem = orbit.problem(k)
    rel = orbit.relative(np.arange(k) * problem.h)
    total = orbit.m1 + orbit.m2
    values = np.stack([-orbit.m2 / total * rel, orbit.m1 / total * rel], axis=1)
    return Trajectory(values, problem)


@dataclass(frozen=True)
class FlowResult:
    t: np.ndarray
    q: np.ndarray
    v: np.ndarray


def accelerations(q: np.ndarray, problem: ProblemSpec) -> np.ndarray:
    """``-grad U / m`` for a single configuration ``(N, d)``."""
    _, grad = node_potentials(q[None], problem, want_grad=True)
    return -grad[0] / problem.mass_array[:, None]


def flow_energy(q: np.ndarray, v: np.ndarray, problem: ProblemSpec) -> float:
    """``sum m|v|^2/2 + U`` (U is nonpositive, so this is the conserved energy)."""
    u, _ = node_potentials(q[None], problem)
    return float(0.5 * np.sum(problem.mass_array[:, None] * v * v) + u[0])


def rk4_flow(q0, v0, problem: ProblemSpec, steps: int, t_end: float,
             min_sep: float = 1e-9) -> FlowResult:
    """Classical RK4 for ``m_i q_i'' = -grad_i U`` with ``steps`` fixed steps.

    Returns every step, ``steps + 1`` samples including the start.
    """
    q = np.array(q0, dtype=float)
    v = np.array(v0, dtype=float)
    n = problem.n_bodies
    dt = t_end / steps
    qs = np.empty((steps + 1,) + q.shape)
    vs = np.empty_like(qs)
    qs[0], vs[0] = q, v
    iu, lu = np.triu_indices(n, 1)

    def acc(x):
        return accelerations(x, problem)

    for step in range(steps):
        a1 = acc(q)
        q2, v2 = q + 0.5 * dt * v, v + 0.5 * dt * a1
        a2 = acc(q2)
        q3, v3 = q + 0.5 * dt * v2, v + 0.5 * dt * a2
        a3 = acc(q3)
        q4, v4 = q + dt * v3, v + dt * a3
        a4 = acc(q4)
        q = q + dt / 6.0 * (v + 2.0 * v2 + 2.0 * v3 + v4)
        v = v + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(v))):
            raise FloatingPointError(f"rk4_flow: non-finite state at step {step + 1}")
        if n > 1:
            r = np.linalg.norm(q[iu] - q[lu], axis=-1)
            p = int(np.argmin(r))
            if r[p] < min_sep:
                raise SingularityError(
                    PairSeparation(step + 1, int(iu[p]), int(lu[p]), float(r[p])),
                    f"rk4_flow: bodies {iu[p]} and {lu[p]} closer than {min_sep} at step {step + 1}")
        qs[step + 1], vs[step + 1] = q, v
    return FlowResult(np.arange(steps + 1) * dt, qs, vs)


def compare_to_flow(traj: Trajectory, substeps: int | None = None) -> float:
    """Largest node deviation between ``traj`` and the flow from its own initial data.

    Initial velocity is the central difference ``(q(1) - q(k-1)) / 2h``.
    The flow runs over one period with ``substeps`` RK4 steps per node
    interval (default: at least 8192 steps per period).
    """
    spec = traj.spec
    k = spec.k
    if substeps is None:
        substeps = max(1, math.ceil(8192 / k))
    q = traj.values
    v0 = (q[1] - q[k - 1]) / (2.0 * spec.h)
    flow = rk4_flow(q[0], v0, spec, k * substeps, spec.period)
    at_nodes = flow.q[: k * substeps : substeps]
    return float(np.max(np.linalg.norm(at_nodes - q, axis=-1)))
