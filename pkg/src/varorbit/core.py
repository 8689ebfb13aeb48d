"""Problem definition, periodic trajectories and separation queries."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class SpecError(ValueError):
    """Invalid problem or symmetry specification."""


class DomainError(ValueError):
    """Argument outside the domain of an operation."""


class SingularityError(ArithmeticError):
    """Two bodies coincide where a potential must be evaluated."""

    def __init__(self, separation: "PairSeparation", message: str | None = None):
        self.separation = separation
        sep = separation
        super().__init__(
            message or f"collision: bodies {sep.i} and {sep.l} coincide at node {sep.s}"
        )


@dataclass(frozen=True)
class ProblemSpec:
    """An N-body type problem on a uniform periodic grid.

    The pair potential is ``-G m_i m_l / r**alpha``; ``delta > 0`` adds the
    strong-force term ``-phi(r) / r**2`` near collisions.
    """

    n_bodies: int
    dim: int
    masses: tuple[float, ...]
    period: float
    k: int
    alpha: float = 1.0
    delta: float = 0.0
    g_const: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "masses", tuple(float(x) for x in self.masses))
        if int(self.n_bodies) != self.n_bodies or self.n_bodies < 1:
            raise SpecError(f"n_bodies must be a positive integer, got {self.n_bodies!r}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise SpecError(f"dim must be a positive integer, got {self.dim!r}")
        if len(self.masses) != self.n_bodies:
            raise SpecError(f"masses has {len(self.masses)} entries, expected {self.n_bodies}")
        if not all(math.isfinite(x) and x > 0 for x in self.masses):
            raise SpecError(f"masses must be finite and positive, got {list(self.masses)}")
        if int(self.k) != self.k or self.k < 3:
            raise SpecError(f"k must be an integer >= 3, got {self.k!r}")
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise SpecError(f"alpha must be positive, got {self.alpha!r}")
        if not (math.isfinite(self.period) and self.period > 0):
            raise SpecError(f"period must be positive, got {self.period!r}")
        if not (math.isfinite(self.delta) and self.delta >= 0):
            raise SpecError(f"delta must be nonnegative, got {self.delta!r}")
        if not (math.isfinite(self.g_const) and self.g_const > 0):
            raise SpecError(f"g_const must be positive, got {self.g_const!r}")

    @property
    def h(self) -> float:
        return self.period / self.k

    @property
    def mass_array(self) -> np.ndarray:
        return np.array(self.masses, dtype=float)

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.k, self.n_bodies, self.dim)

    def node_time(self, s: int) -> float:
        return s * self.h

    def with_k(self, k: int) -> "ProblemSpec":
        return ProblemSpec(self.n_bodies, self.dim, self.masses, self.period, k,
                           self.alpha, self.delta, self.g_const)


@dataclass(frozen=True)
class Trajectory:
    """Node values of a periodic piecewise-linear path, shape ``(k, N, d)``.

    Node ``s`` sits at time ``s * h``; node indices wrap modulo ``k``.
    """

    values: np.ndarray
    spec: ProblemSpec = field(repr=False)

    def __post_init__(self):
        arr = np.array(self.values, dtype=float, copy=True)
        if arr.shape != self.spec.shape:
            raise SpecError(f"trajectory shape {arr.shape} does not match {self.spec.shape}")
        if not np.all(np.isfinite(arr)):
            raise SpecError("trajectory contains non-finite coordinates")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def k(self) -> int:
        return self.spec.k

    def node(self, s: int) -> np.ndarray:
        return self.values[s % self.spec.k]

    def replace(self, values) -> "Trajectory":
        return Trajectory(values, self.spec)


@dataclass(frozen=True)
class PairSeparation:
    s: int
    i: int
    l: int
    r: float


def interpolate(traj: Trajectory, t: float) -> np.ndarray:
    """Piecewise-linear position of every body at time ``t`` in ``[0, T]``."""
    spec = traj.spec
    if not (0.0 <= t <= spec.period):
        raise DomainError(f"t={t!r} outside [0, {spec.period!r}]")
    h = spec.h
    k = spec.k
    j = int(round(t / h))
    if j * h == t or (j == k and t == spec.period):
        return traj.values[j % k].copy()
    u = t / h
    j = min(int(math.floor(u)), k - 1)
    w = u - j
    return (1.0 - w) * traj.values[j] + w * traj.values[(j + 1) % k]


def refine(traj: Trajectory, factor: int = 2) -> Trajectory:
    """Resample on a grid with ``factor`` times more nodes along the same polygon."""
    if factor < 1:
        raise DomainError("refinement factor must be >= 1")
    spec = traj.spec.with_k(traj.k * factor)
    q = traj.values
    nxt = np.roll(q, -1, axis=0)
    out = np.empty(spec.shape)
    for p in range(factor):
        w = p / factor
        out[p::factor] = (1.0 - w) * q + w * nxt
    return Trajectory(out, spec)


def min_separation(traj: Trajectory) -> PairSeparation:
    """Smallest pairwise distance over all nodes, ties to the smallest (s, i, l)."""
    n = traj.spec.n_bodies
    if n < 2:
        raise DomainError("min_separation needs at least two bodies")
    q = traj.values
    iu, lu = np.triu_indices(n, 1)
    r = np.linalg.norm(q[:, iu, :] - q[:, lu, :], axis=-1)
    # argmin returns the first minimum in row-major (s, pair) order
    flat = int(np.argmin(r))
    s, p = divmod(flat, len(iu))
    return PairSeparation(s, int(iu[p]), int(lu[p]), float(r[s, p]))
