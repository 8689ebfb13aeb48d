"""Solution checks and grid-refinement studies."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .action import action, discrete_energy, evaluate, residual_n1
from .core import SingularityError, Trajectory, min_separation, refine
from .optimizer import OptimizerConfig, minimize, random_init
from .reference import LagrangeOrbit, compare_to_flow, sample_lagrange
from .symmetry import SymmetrySpec, check_symmetry, reconstruct, reduce_gradient, restrict


def fit_order(steps, values) -> float:
    """Least-squares slope of ``log(values)`` against ``log(steps)``."""
    return float(np.polyfit(np.log(steps), np.log(values), 1)[0])


def directional_fd_error(traj: Trajectory, n_dirs: int = 4, seed: int = 0,
                         perturb: float = 1e-2) -> float:
    """Worst relative gap between analytic and central-difference directional derivatives.

    Evaluated at a seeded perturbation of ``traj`` so the gradient is not
    trivially zero at a critical point.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    spec = traj.spec
    q = traj.values + perturb * rng.standard_normal(spec.shape)
    _, _, _, grad = evaluate(q, spec)
    eps = 1e-6 * max(1.0, float(np.max(np.abs(q))))
    worst = 0.0
    for _ in range(n_dirs):
        v = rng.standard_normal(spec.shape)
        v /= np.linalg.norm(v)
        jp = evaluate(q + eps * v, spec)[0]
        jm = evaluate(q - eps * v, spec)[0]
        fd = (jp - jm) / (2 * eps)
        an = float(np.sum(grad * v))
        worst = max(worst, abs(fd - an) / max(abs(an), 1e-12))
    return worst


@dataclass(frozen=True)
class CheckRow:
    name: str
    value: float
    threshold: float
    passed: bool
    relation: str


def check_trajectory(traj: Trajectory, sym: SymmetrySpec, grad_tol: float | None = None,
                     energy_rtol: float = 0.05, fd_rtol: float = 1e-6) -> list[CheckRow]:
    """Criticality, symmetry, separation and energy checks for one trajectory."""
    rows = []
    viol = check_symmetry(traj, sym)
    rows.append(CheckRow("symmetry_violation", viol, 0.0, viol == 0.0, "=="))
    sep = min_separation(traj)
    rows.append(CheckRow("min_separation", sep.r, 0.0, sep.r > 0.0, ">"))
    if sep.r == 0.0:
        return rows
    rep = action(traj)
    tol = grad_tol if grad_tol is not None else 1e-8 * max(1.0, abs(rep.j))
    rows.append(CheckRow("action_j", rep.j, math.nan, math.isfinite(rep.j), "finite"))
    red = float(np.linalg.norm(reduce_gradient(rep.grad, sym, traj.spec)))
    rows.append(CheckRow("reduced_grad_norm", red, tol, red < tol, "<"))
    res = residual_n1(traj)
    if sym.is_uniform:
        rows.append(CheckRow("residual_euclidean", res.euclidean_norm, tol,
                             res.euclidean_norm <= tol, "<="))
    else:
        # mixed divisors: reduced stationarity does not imply full stationarity
        rows.append(CheckRow("residual_euclidean", res.euclidean_norm, math.nan,
                             math.isfinite(res.euclidean_norm), "info"))
    rows.append(CheckRow("residual_l2_time", res.norm, math.nan, math.isfinite(res.norm), "info"))
    fd = directional_fd_error(traj)
    rows.append(CheckRow("gradient_fd_rel_err", fd, fd_rtol, fd < fd_rtol, "<"))
    energy = discrete_energy(traj)
    bound = energy_rtol * max(1.0, abs(energy.mean))
    rows.append(CheckRow("energy_max_dev", energy.max_dev, bound, energy.max_dev <= bound, "<="))
    return rows


def format_rows(rows) -> str:
    lines = [f"{'check':<22} {'value':>24} {'rel':>5} {'threshold':>12}  result"]
    for r in rows:
        status = "PASS" if r.passed else "FAIL"
        thr = "" if math.isnan(r.threshold) else format(r.threshold, ".3g")
        lines.append(f"{r.name:<22} {r.value:>24.17g} {r.relation:>5} {thr:>12}  {status}")
    return "\n".join(lines)


def lagrange_study(ks=(64, 128, 256), orbit: LagrangeOrbit = LagrangeOrbit(1.0, 1.0)) -> dict:
    """Residual and flow-deviation orders of the sampled Lagrange orbit."""
    hs, res, dev = [], [], []
    for k in ks:
        traj = sample_lagrange(orbit, k)
        hs.append(traj.spec.h)
        res.append(residual_n1(traj).norm)
        dev.append(compare_to_flow(traj))
    return {"k": list(ks), "h": hs, "residual_norm": res, "flow_deviation": dev,
            "residual_order": fit_order(hs, res), "flow_order": fit_order(hs, dev)}


def refinement_study(problem, sym: SymmetrySpec, config: OptimizerConfig, levels: int = 2,
                     red0=None, callback_factory=None) -> list[dict]:
    """Minimize at ``problem.k``, then repeatedly double k and re-minimize.

    Each finer grid starts from the piecewise-linear resampling of the
    previous minimizer, so all levels follow the same orbit.
    """
    out = []
    if red0 is None:
        red0 = random_init(problem, sym, config.seed, config.init_radius)
    for level in range(levels):
        cb = callback_factory(level) if callback_factory else None
        red, rep = minimize(red0, problem, sym, config, callback=cb)
        traj = reconstruct(red, sym, problem)
        try:
            dev = compare_to_flow(traj)
        except (SingularityError, FloatingPointError):
            dev = math.nan
        out.append({"k": problem.k, "h": problem.h, "report": rep, "trajectory": traj,
                    "energy_max_dev": rep.energy_max_dev, "flow_deviation": dev})
        if level + 1 < levels:
            finer = refine(traj, 2)
            problem = finer.spec
            red0 = restrict(finer, sym)
    return out
