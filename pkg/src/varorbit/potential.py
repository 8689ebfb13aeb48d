"""Power-law pair potentials, the strong-force cutoff, and node sums.

Sign convention: ``U_il(r) = -m_i m_l / r**alpha`` so that the total potential
is nonpositive and tends to ``-inf`` at collision. The regularized potential
subtracts ``phi(r) / r**2`` where the cutoff ``phi`` is one near collision
(``r <= delta/2``), zero beyond ``delta`` and a C1 smoothstep in between.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._backend import get_kernels
from .core import PairSeparation, SingularityError, Trajectory


def _check_r(r):
    if not r > 0:
        raise SingularityError(PairSeparation(-1, -1, -1, float(r)),
                               f"pair potential is singular at r={r!r}")


def pair_potential(r, m_i, m_l, alpha=1.0, g=1.0):
    _check_r(r)
    return -g * m_i * m_l / r**alpha


def pair_force(diff, m_i, m_l, alpha=1.0, g=1.0):
    """Gradient of ``U_il`` with respect to ``q_i``, where ``diff = q_i - q_l``."""
    diff = np.asarray(diff, dtype=float)
    r = float(np.linalg.norm(diff))
    _check_r(r)
    return alpha * g * m_i * m_l * diff / r ** (alpha + 2)


def cutoff_phi(r, delta):
    """Cutoff value and its derivative: 1 for r <= delta/2, 0 for r >= delta."""
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta!r}")
    half = 0.5 * delta
    if r <= half:
        return 1.0, 0.0
    if r >= delta:
        return 0.0, 0.0
    u = (r - half) / half
    return 1.0 - (3.0 * u * u - 2.0 * u**3), -6.0 * u * (1.0 - u) / half


def regularized_pair_potential(r, m_i, m_l, alpha, delta, g=1.0):
    _check_r(r)
    phi, _ = cutoff_phi(r, delta)
    return pair_potential(r, m_i, m_l, alpha, g) - phi / r**2


def regularized_pair_force(diff, m_i, m_l, alpha, delta, g=1.0):
    diff = np.asarray(diff, dtype=float)
    r = float(np.linalg.norm(diff))
    _check_r(r)
    phi, dphi = cutoff_phi(r, delta)
    # d/dr of -phi/r^2
    dreg = -dphi / r**2 + 2.0 * phi / r**3
    return pair_force(diff, m_i, m_l, alpha, g) + dreg * diff / r


@dataclass(frozen=True)
class PotentialTotal:
    u_hat: float
    grad: np.ndarray
    node_values: np.ndarray


def separation_from_code(code: int, values: np.ndarray) -> PairSeparation:
    n = values.shape[1]
    s, rest = divmod(int(code), n * n)
    i, l = divmod(rest, n)
    return PairSeparation(s, i, l, float(np.linalg.norm(values[s, i] - values[s, l])))


def node_potentials(values: np.ndarray, spec, want_grad=False, kernels=None):
    """Raw per-node sweep; raises :class:`SingularityError` on coincident pairs."""
    kern = kernels or get_kernels()
    u_nodes, grad, bad = kern.potential_sweep(
        values, spec.mass_array, float(spec.alpha), float(spec.delta),
        float(spec.g_const), want_grad)
    if bad >= 0:
        raise SingularityError(separation_from_code(bad, values))
    return u_nodes, grad


def total_potential(traj: Trajectory) -> PotentialTotal:
    """Sum of node potentials and its gradient (regularized when ``delta > 0``)."""
    u_nodes, grad = node_potentials(traj.values, traj.spec, want_grad=True)
    u_hat = 0.0
    for u in u_nodes:
        u_hat += float(u)
    return PotentialTotal(u_hat, grad, u_nodes)
