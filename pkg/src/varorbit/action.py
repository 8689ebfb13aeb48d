"""Discrete action, its gradient, the difference-equation residual and energy.

The kinetic quadratic form uses neighbour differences on the periodic grid;
the circulant second-difference matrix is never assembled.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._backend import get_kernels
from .core import SingularityError, Trajectory
from .potential import node_potentials, separation_from_code


@dataclass(frozen=True)
class ActionReport:
    j: float
    grad: np.ndarray
    grad_norm: float
    kinetic: float
    u_hat: float


@dataclass(frozen=True)
class Residual:
    """Entrywise residual of the difference equation.

    ``norm`` is the discrete L2-in-time norm of the equation-of-motion defect,
    ``sqrt(h * sum((res / h)**2))``, which converges like ``h**2`` on smooth
    solutions. ``euclidean_norm`` is the plain 2-norm of ``res``.
    """

    res: np.ndarray
    norm: float
    euclidean_norm: float


@dataclass(frozen=True)
class EnergySeries:
    e: np.ndarray
    mean: float
    max_dev: float


def evaluate(values: np.ndarray, spec, kernels=None):
    """``(j, kinetic, u_hat, grad)`` on a raw ``(k, N, d)`` array."""
    kern = kernels or get_kernels()
    j, kin, u_hat, grad, bad = kern.action(
        values, spec.mass_array, float(spec.alpha), float(spec.delta),
        float(spec.g_const), spec.h)
    if bad >= 0:
        raise SingularityError(separation_from_code(bad, values))
    return float(j), float(kin), float(u_hat), grad


def action(traj: Trajectory) -> ActionReport:
    j, kin, u_hat, grad = evaluate(traj.values, traj.spec)
    return ActionReport(j, grad, float(np.linalg.norm(grad)), kin, u_hat)


def residual_n1(traj: Trajectory) -> Residual:
    """Residual ``(m/h)(2q(s) - q(s+1) - q(s-1)) - h grad U``; equals the action gradient."""
    _, _, _, res = evaluate(traj.values, traj.spec)
    euclid = float(np.linalg.norm(res))
    return Residual(res, euclid / math.sqrt(traj.spec.h), euclid)


def discrete_energy(traj: Trajectory) -> EnergySeries:
    """Energy per segment: slope kinetic energy plus the endpoint-averaged potential.

    With the nonpositive potential convention the conserved quantity of the
    continuous flow is ``K + U``.
    """
    spec = traj.spec
    q = traj.values
    u_nodes, _ = node_potentials(q, spec)
    kin = get_kernels().segment_kinetic(q, spec.mass_array, spec.h)
    e = kin + 0.5 * (u_nodes + np.roll(u_nodes, -1))
    mean = float(np.mean(e))
    return EnergySeries(e, mean, float(np.max(np.abs(e - mean))))
