"""Command line front end.

    varorbit run <config.yaml>
    varorbit check <trajectory.csv> <config.yaml>
    varorbit plot <trajectory.csv> <out.svg> [--config CONFIG]
    varorbit convergence <config.yaml>
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import math
import sys
from pathlib import Path

from . import io
from .core import SpecError
from .diagnostics import check_trajectory, fit_order, format_rows, lagrange_study, refinement_study
from .optimizer import OptimizationError, minimize, random_init
from .plot import PlotError, caption, write_svg
from .symmetry import reconstruct

log = logging.getLogger("varorbit")


def cmd_run(args) -> int:
    try:
        cfg = io.load_config(args.config)
    except io.ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out = Path(cfg.output_dir)
    if not out.is_absolute():
        out = Path(args.config).resolve().parent / out
    out.mkdir(parents=True, exist_ok=True)
    results = []
    for n in range(cfg.runs):
        opt = dataclasses.replace(cfg.optimizer, seed=cfg.optimizer.seed + n)
        red0 = random_init(cfg.problem, cfg.symmetry, opt.seed, opt.init_radius)
        try:
            red, rep = minimize(red0, cfg.problem, cfg.symmetry, opt)
        except OptimizationError as exc:
            log.warning("seed %d: %s", opt.seed, exc)
            results.append((opt.seed, None))
            continue
        stem = out / io.run_stem(opt.seed)
        traj = reconstruct(red, cfg.symmetry, cfg.problem)
        io.write_trajectory_csv(traj, stem.with_suffix(".csv"))
        io.write_report(rep, stem.with_suffix(".report"))
        if cfg.emit_svg and cfg.problem.dim in (2, 3):
            write_svg(traj.values, stem.with_suffix(".svg"), caption(cfg.problem.masses, rep.j))
        print(f"seed {opt.seed}: J={rep.j:.10g} converged={rep.converged} "
              f"iters={rep.iters} min_sep={rep.min_sep.r:.4g}")
        results.append((opt.seed, rep))
    io.write_index(results, out / "index.csv")
    n_conv = sum(1 for _, r in results if r is not None and r.converged)
    print(f"{n_conv}/{cfg.runs} runs converged; index written to {out / 'index.csv'}")
    return 0 if n_conv else 2


def _report_for(csv_path):
    path = Path(csv_path).with_suffix(".report")
    return io.read_report(path) if path.exists() else None


def cmd_check(args) -> int:
    try:
        cfg = io.load_config(args.config)
        traj = io.load_trajectory(args.trajectory, cfg.problem)
    except (io.ConfigError, SpecError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    tol = cfg.optimizer.grad_tol
    if tol is None:
        rep = _report_for(args.trajectory)
        if rep is not None and "grad_tol" in rep:
            tol = float(rep["grad_tol"])
    rows = check_trajectory(traj, cfg.symmetry, grad_tol=tol, energy_rtol=args.energy_rtol)
    print(format_rows(rows))
    ok = all(r.passed for r in rows)
    print("ALL CHECKS PASS" if ok else "SOME CHECKS FAIL")
    return 0 if ok else 2


def cmd_plot(args) -> int:
    try:
        values, _ = io.read_trajectory_csv(args.trajectory)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    title = None
    if args.config:
        from .action import action
        try:
            cfg = io.load_config(args.config)
            traj = io.load_trajectory(args.trajectory, cfg.problem)
        except (io.ConfigError, SpecError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        title = caption(cfg.problem.masses, action(traj).j)
    else:
        rep = _report_for(args.trajectory)
        if rep is not None and "masses" in rep and "j" in rep:
            title = caption([float(m) for m in rep["masses"].split(",")], float(rep["j"]))
    try:
        write_svg(values, args.out, title)
    except PlotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def cmd_convergence(args) -> int:
    try:
        cfg = io.load_config(args.config)
    except io.ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    lag = lagrange_study()
    print("Lagrange orbit (m=1, a=1):")
    for k, r, d in zip(lag["k"], lag["residual_norm"], lag["flow_deviation"]):
        print(f"  k={k:5d}  residual={r:.6e}  flow_dev={d:.6e}")
    print(f"  residual order = {lag['residual_order']:.4f}")
    print(f"  flow deviation order = {lag['flow_order']:.4f}")
    try:
        levels = refinement_study(cfg.problem, cfg.symmetry, cfg.optimizer, levels=args.levels)
    except OptimizationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"Minimizer refinement (seed {cfg.optimizer.seed}):")
    for lev in levels:
        rep = lev["report"]
        print(f"  k={lev['k']:5d}  J={rep.j:.10g}  converged={rep.converged}  "
              f"energy_max_dev={lev['energy_max_dev']:.6e}  flow_dev={lev['flow_deviation']:.6e}")
    hs = [lev["h"] for lev in levels]
    for key in ("energy_max_dev", "flow_deviation"):
        vals = [lev[key] for lev in levels]
        if all(math.isfinite(v) and v > 0 for v in vals):
            print(f"  {key} order = {fit_order(hs, vals):.4f}")
    return 0 if all(lev["report"].converged for lev in levels) else 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="varorbit",
                                     description="Periodic N-body orbits by discrete action minimization.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="multi-start minimization from a config file")
    p.add_argument("config")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("check", help="verify a trajectory CSV against a config")
    p.add_argument("trajectory")
    p.add_argument("config")
    p.add_argument("--energy-rtol", type=float, default=0.05,
                   help="energy max deviation bound relative to max(1, |mean|)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("plot", help="render a trajectory CSV to SVG")
    p.add_argument("trajectory")
    p.add_argument("out")
    p.add_argument("--config", help="config used to compute J for the caption")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("convergence", help="k-doubling order study")
    p.add_argument("config")
    p.add_argument("--levels", type=int, default=2)
    p.set_defaults(func=cmd_convergence)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
