"""Steepest descent with Armijo backtracking on the symmetry-reduced action."""
from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ._backend import get_kernels
from .action import discrete_energy, evaluate, residual_n1
from .core import PairSeparation, ProblemSpec, SingularityError, Trajectory, min_separation
from .potential import separation_from_code
from .symmetry import SymmetrySpec, reconstruct_values, reduce_gradient

log = logging.getLogger(__name__)

#: Random starts use numpy's PCG64 bit generator; the stream for a given seed
#: is stable across numpy releases (numpy's stream-compatibility policy).
PRNG_NAME = "numpy.random.PCG64"


class OptimizationError(RuntimeError):
    pass


@dataclass(frozen=True)
class OptimizerConfig:
    max_iters: int = 50000
    grad_tol: Optional[float] = None  # None -> 1e-8 * max(1, |J0|)
    step_init: float = 1.0
    armijo_c: float = 1e-4
    backtrack: float = 0.5
    step_floor: float = 1e-16
    seed: int = 0
    init_radius: float = 1.0

    def __post_init__(self):
        if self.max_iters < 0:
            raise ValueError("max_iters must be nonnegative")
        if self.grad_tol is not None and not self.grad_tol > 0:
            raise ValueError("grad_tol must be positive")
        if not self.step_init > 0:
            raise ValueError("step_init must be positive")
        if not 0 < self.armijo_c < 1:
            raise ValueError("armijo_c must lie in (0, 1)")
        if not 0 < self.backtrack < 1:
            raise ValueError("backtrack must lie in (0, 1)")
        if not self.step_floor > 0:
            raise ValueError("step_floor must be positive")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")
        if not self.init_radius >= 0:
            raise ValueError("init_radius must be nonnegative")


@dataclass
class OrbitReport:
    j: float
    grad_norm: float
    iters: int
    converged: bool
    reason: str
    grad_tol: float
    min_sep: PairSeparation
    energy_mean: float
    energy_max_dev: float
    residual_norm: float
    problem: ProblemSpec
    symmetry: SymmetrySpec
    config: OptimizerConfig
    j_history: list = field(default_factory=list, repr=False)
    j_drift: float = 0.0

    @property
    def seed(self) -> int:
        return self.config.seed


def random_init(problem: ProblemSpec, sym: SymmetrySpec, seed: int,
                init_radius: float = 1.0) -> np.ndarray:
    """I.i.d. uniform entries on ``[-init_radius, init_radius]`` from PCG64(seed)."""
    rng = np.random.Generator(np.random.PCG64(seed))
    return init_radius * rng.uniform(-1.0, 1.0, size=sym.reduced_size(problem))


class ReducedAction:
    """Action and reduced gradient as functions of the fundamental-domain vector."""

    def __init__(self, problem: ProblemSpec, sym: SymmetrySpec):
        sym.validate(problem)
        self.problem = problem
        self.sym = sym

    def __call__(self, red):
        q = reconstruct_values(red, self.sym, self.problem)
        j, _, _, grad = evaluate(q, self.problem)
        return j, reduce_gradient(grad, self.sym, self.problem)

    def difference(self, red, trial):
        """``J(trial) - J(red)`` evaluated from the step itself.

        Near a minimizer the decrease of a descent step falls below the
        rounding error of J; differencing two J values then cannot detect it.
        """
        p = self.problem
        q = reconstruct_values(red, self.sym, p)
        dq = reconstruct_values(trial, self.sym, p) - q
        dj, bad = get_kernels().action_delta(
            q, dq, p.mass_array, float(p.alpha), float(p.delta), float(p.g_const), p.h)
        if bad >= 0:
            raise SingularityError(separation_from_code(bad, q + dq))
        return float(dj)


def minimize(red0, problem: ProblemSpec, sym: SymmetrySpec,
             config: OptimizerConfig = OptimizerConfig(),
             callback: Optional[Callable] = None,
             objective: Optional[Callable] = None):
    """Minimize the action over the reduced variables.

    A trial step is accepted when the sufficient-decrease condition holds for
    the change of J computed from the step (see
    :meth:`ReducedAction.difference`). ``report.j_history`` is the initial J
    followed by the running sum of those accepted changes; ``report.j`` is a
    fresh evaluation at the final point and ``report.j_drift`` the gap
    between the two.

    ``objective(red) -> (value, reduced_grad)`` replaces the action when
    given (test hook); it may raise :class:`SingularityError`. ``callback``
    is called as ``callback(iteration, red, j)`` on the start point and on
    every accepted iterate.

    Returns ``(red, OrbitReport)``.
    """
    fun = objective or ReducedAction(problem, sym)
    diff = getattr(fun, "difference", None)
    x = np.array(red0, dtype=float)
    if x.shape != (sym.reduced_size(problem),):
        raise ValueError(f"red0 has shape {x.shape}, expected ({sym.reduced_size(problem)},)")
    try:
        j, g = fun(x)
    except SingularityError as exc:
        raise OptimizationError(f"initial trajectory collides: {exc}") from exc
    if not math.isfinite(j):
        raise OptimizationError(f"initial action is not finite (J={j})")
    tol = config.grad_tol if config.grad_tol is not None else 1e-8 * max(1.0, abs(j))
    gn = float(np.linalg.norm(g))
    history = [j]
    if callback is not None:
        callback(0, x, j)

    it = 0
    reason = "max_iters"
    c = config.armijo_c
    while True:
        if gn < tol:
            reason = "grad_tol"
            break
        if it >= config.max_iters:
            break
        t = config.step_init
        accepted = False
        while t >= config.step_floor:
            trial = x - t * g
            try:
                j_new, g_new = fun(trial)
                dj = diff(x, trial) if diff is not None else j_new - j
            except SingularityError:
                t *= config.backtrack
                continue
            if math.isfinite(j_new) and dj <= -c * t * gn * gn:
                accepted = True
                break
            t *= config.backtrack
        if not accepted:
            reason = "step_floor"
            break
        x, j, g = trial, j_new, g_new
        gn = float(np.linalg.norm(g))
        it += 1
        history.append(history[-1] + dj)
        if callback is not None:
            callback(it, x, j)

    converged = reason == "grad_tol"
    log.debug("minimize: %s after %d iterations, J=%.12g |g|=%.3g", reason, it, j, gn)
    report = _report(x, j, gn, it, converged, reason, tol, problem, sym, config, history)
    return x, report


def _report(x, j, gn, it, converged, reason, tol, problem, sym, config, history):
    drift = abs(j - history[-1])
    traj = Trajectory(reconstruct_values(x, sym, problem), problem)
    sep = min_separation(traj) if problem.n_bodies > 1 else PairSeparation(0, 0, 0, math.inf)
    e_mean = e_dev = res_norm = math.nan
    if sep.r > 0:
        energy = discrete_energy(traj)
        e_mean, e_dev = energy.mean, energy.max_dev
        res_norm = residual_n1(traj).norm
    return OrbitReport(j, gn, it, converged, reason, tol, sep, e_mean, e_dev, res_norm,
                       problem, sym, dataclasses.replace(config), history, drift)


def multistart(problem: ProblemSpec, sym: SymmetrySpec, config: OptimizerConfig, runs: int,
               callback_factory: Optional[Callable] = None):
    """Independent minimizations from seeds ``config.seed, config.seed + 1, ...``.

    Returns a list of ``(red, report)`` in seed order; a start that collides
    gives ``(red0, None)``.
    """
    results = []
    for n in range(runs):
        cfg = dataclasses.replace(config, seed=config.seed + n)
        red0 = random_init(problem, sym, cfg.seed, cfg.init_radius)
        cb = callback_factory(cfg.seed) if callback_factory else None
        try:
            results.append(minimize(red0, problem, sym, cfg, callback=cb))
        except OptimizationError as exc:
            log.warning("seed %d: %s", cfg.seed, exc)
            results.append((red0, None))
    return results
