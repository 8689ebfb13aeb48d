"""Multi-radial symmetry as a linear reduction onto a fundamental domain.

Coordinates are split into blocks. Block ``j`` of width ``b_j`` with divisor
``A_j`` obeys ``q^(j)(s + k/A_j) = -q^(j)(s)``, so only its first ``k/A_j``
nodes are free. A reduced vector is the flat concatenation over blocks of
arrays shaped ``(k/A_j, N, b_j)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import ProblemSpec, SpecError, Trajectory


@dataclass(frozen=True)
class Block:
    width: int
    divisor: int


@dataclass(frozen=True)
class SymmetrySpec:
    blocks: tuple[Block, ...]

    def __post_init__(self):
        blocks = tuple(b if isinstance(b, Block) else Block(*b) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if not blocks:
            raise SpecError("symmetry needs at least one block")
        for n, b in enumerate(blocks):
            if int(b.width) != b.width or b.width < 1:
                raise SpecError(f"blocks[{n}]: width must be a positive integer, got {b.width!r}")
            if int(b.divisor) != b.divisor or b.divisor < 2 or b.divisor % 2:
                raise SpecError(
                    f"blocks[{n}]: divisor must be a positive even integer, got {b.divisor!r}")

    @classmethod
    def radial(cls, dim: int) -> "SymmetrySpec":
        """``q(t + T/2) = -q(t)`` on all coordinates."""
        return cls((Block(dim, 2),))

    @property
    def is_uniform(self) -> bool:
        """True when every block shares one divisor.

        Only then is the constraint set the fixed set of the action-preserving
        map ``q(s) -> -q(s + k/A)``, so reduced critical points are also full
        critical points. With mixed divisors they generally are not.
        """
        return len({b.divisor for b in self.blocks}) == 1

    def validate(self, problem: ProblemSpec) -> None:
        total = sum(b.width for b in self.blocks)
        if total != problem.dim:
            raise SpecError(f"block widths sum to {total}, problem dim is {problem.dim}")
        for n, b in enumerate(self.blocks):
            if problem.k % b.divisor:
                raise SpecError(f"blocks[{n}]: divisor {b.divisor} does not divide k={problem.k}")

    def columns(self):
        c0 = 0
        for b in self.blocks:
            yield b, slice(c0, c0 + b.width)
            c0 += b.width

    def reduced_size(self, problem: ProblemSpec) -> int:
        self.validate(problem)
        return sum(problem.k // b.divisor * problem.n_bodies * b.width for b in self.blocks)


@lru_cache(maxsize=64)
def _layout(sym: SymmetrySpec, problem: ProblemSpec):
    sym.validate(problem)
    k, n, d = problem.shape
    idx = np.empty((k, n, d), dtype=np.intp)
    sign = np.empty((k, n, d))
    offset = 0
    for b, cols in sym.columns():
        p = k // b.divisor
        s = np.arange(k)
        local = np.arange(p * n * b.width).reshape(p, n, b.width)
        idx[:, :, cols] = offset + local[s % p]
        sign[:, :, cols] = np.where((s // p) % 2 == 0, 1.0, -1.0)[:, None, None]
        offset += p * n * b.width
    idx = idx.ravel()
    sign = sign.ravel()
    idx.setflags(write=False)
    sign.setflags(write=False)
    return idx, sign, offset


def reconstruct_values(red: np.ndarray, sym: SymmetrySpec, problem: ProblemSpec) -> np.ndarray:
    idx, sign, size = _layout(sym, problem)
    red = np.asarray(red, dtype=float)
    if red.shape != (size,):
        raise SpecError(f"reduced vector has shape {red.shape}, expected ({size},)")
    return (red[idx] * sign).reshape(problem.shape)


def reconstruct(red: np.ndarray, sym: SymmetrySpec, problem: ProblemSpec) -> Trajectory:
    """Full symmetric trajectory from the fundamental-domain values (exact sign flips)."""
    return Trajectory(reconstruct_values(red, sym, problem), problem)


def reduce_gradient(full_grad: np.ndarray, sym: SymmetrySpec, problem: ProblemSpec) -> np.ndarray:
    """Adjoint of :func:`reconstruct`: signed sum of the full gradient over shifted copies."""
    idx, sign, size = _layout(sym, problem)
    full_grad = np.asarray(full_grad, dtype=float)
    if full_grad.shape != problem.shape:
        raise SpecError(f"gradient has shape {full_grad.shape}, expected {problem.shape}")
    return np.bincount(idx, weights=sign * full_grad.ravel(), minlength=size)


def restrict(traj: Trajectory, sym: SymmetrySpec) -> np.ndarray:
    """Fundamental-domain values of ``traj`` (the left inverse of reconstruct)."""
    sym.validate(traj.spec)
    k = traj.k
    parts = [traj.values[: k // b.divisor, :, cols].ravel() for b, cols in sym.columns()]
    return np.concatenate(parts)


def check_symmetry(traj: Trajectory, sym: SymmetrySpec) -> float:
    """Largest ``|q^(j)(s + k/A_j) + q^(j)(s)|`` over blocks, nodes and bodies."""
    sym.validate(traj.spec)
    q = traj.values
    worst = 0.0
    for b, cols in sym.columns():
        p = traj.k // b.divisor
        block = q[:, :, cols]
        worst = max(worst, float(np.max(np.abs(np.roll(block, -p, axis=0) + block))))
    return worst


def sign_period(traj: Trajectory, cols: slice, rtol: float = 1e-9):
    """Smallest node shift ``p`` with ``q(s + p) = -q(s)`` on ``cols``.

    Returns None when the block is identically (numerically) zero or has no
    such shift.
    """
    block = traj.values[:, :, cols]
    scale = float(np.max(np.abs(block)))
    if scale == 0.0 or scale < 1e-12:
        return None
    for p in range(1, traj.k):
        if np.max(np.abs(np.roll(block, -p, axis=0) + block)) <= rtol * scale:
            return p
    return None
