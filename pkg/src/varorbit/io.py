"""Run configuration, trajectory CSV and report files."""
from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .core import ProblemSpec, SpecError, Trajectory
from .optimizer import PRNG_NAME, OptimizerConfig, OrbitReport
from .symmetry import Block, SymmetrySpec


class ConfigError(ValueError):
    pass


PROBLEM_KEYS = ("n_bodies", "dim", "masses", "alpha", "period", "k", "delta")
OPTIMIZER_KEYS = ("max_iters", "grad_tol", "step_init", "armijo_c", "backtrack",
                  "step_floor", "seed", "init_radius")
RUN_KEYS = ("runs", "output_dir", "emit_svg")
ALL_KEYS = PROBLEM_KEYS + ("blocks",) + OPTIMIZER_KEYS + RUN_KEYS
REQUIRED = ("n_bodies", "dim", "masses", "period", "k", "blocks")


@dataclass(frozen=True)
class RunConfig:
    problem: ProblemSpec
    symmetry: SymmetrySpec
    optimizer: OptimizerConfig
    runs: int = 1
    output_dir: str = "out"
    emit_svg: bool = False


def _key_lines(text):
    """Line number (1-based) of every top-level key."""
    node = yaml.compose(text, Loader=yaml.SafeLoader)
    if node is None or not isinstance(node, yaml.MappingNode):
        return {}
    return {k.value: k.start_mark.line + 1 for k, _ in node.value}


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    """Parse the YAML run configuration; every error names the line or field."""
    try:
        data = yaml.safe_load(text)
        lines = _key_lines(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}" if mark is not None else "?"
        raise ConfigError(f"{source}:{where}: malformed config: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: config must be a mapping of keys to values")

    def where(key):
        return f"{source}:line {lines[key]}" if key in lines else source

    for key in data:
        if key not in ALL_KEYS:
            raise ConfigError(f"{where(key)}: unknown key {key!r}")
    for key in REQUIRED:
        if key not in data:
            raise ConfigError(f"{source}: missing required key {key!r}")

    def num(key, kind=float, default=None):
        if key not in data:
            return default
        value = data[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where(key)}: field {key!r} must be a number, got {value!r}")
        if kind is int and int(value) != value:
            raise ConfigError(f"{where(key)}: field {key!r} must be an integer, got {value!r}")
        return kind(value)

    masses = data["masses"]
    if not isinstance(masses, list) or not all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in masses):
        raise ConfigError(f"{where('masses')}: field 'masses' must be a list of numbers")

    blocks = data["blocks"]
    if not isinstance(blocks, list) or not blocks:
        raise ConfigError(f"{where('blocks')}: field 'blocks' must be a non-empty list")
    parsed = []
    for n, b in enumerate(blocks):
        if not isinstance(b, dict) or set(b) != {"width", "divisor"}:
            raise ConfigError(
                f"{where('blocks')}: blocks[{n}] must be a mapping with keys width and divisor")
        parsed.append(Block(b["width"], b["divisor"]))

    try:
        problem = ProblemSpec(
            n_bodies=num("n_bodies", int), dim=num("dim", int), masses=tuple(masses),
            period=num("period"), k=num("k", int), alpha=num("alpha", default=1.0),
            delta=num("delta", default=0.0))
        symmetry = SymmetrySpec(tuple(parsed))
        symmetry.validate(problem)
    except SpecError as exc:
        msg = str(exc)
        key = "blocks" if msg.startswith("block") else next(
            (k for k in PROBLEM_KEYS if msg.startswith(k)), None)
        raise ConfigError(f"{where(key) if key else source}: {msg}") from exc

    defaults = OptimizerConfig()
    kwargs = {}
    for key in OPTIMIZER_KEYS:
        kind = int if key in ("max_iters", "seed") else float
        if key in data:
            kwargs[key] = num(key, kind)
    try:
        optimizer = OptimizerConfig(**{**defaults.__dict__, **kwargs})
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from exc

    runs = num("runs", int, 1)
    if runs < 1:
        raise ConfigError(f"{where('runs')}: field 'runs' must be >= 1")
    emit_svg = data.get("emit_svg", False)
    if not isinstance(emit_svg, bool):
        raise ConfigError(f"{where('emit_svg')}: field 'emit_svg' must be true or false")
    return RunConfig(problem, symmetry, optimizer, runs, str(data.get("output_dir", "out")),
                     emit_svg)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc}") from exc
    return parse_config(text, str(path))


def fmt(x) -> str:
    """17 significant digits: round-trips any binary64 value."""
    return format(float(x), ".17g")


def write_trajectory_csv(traj: Trajectory, path) -> None:
    k, n, d = traj.values.shape
    header = ["s", "t", "body"] + [f"c{c}" for c in range(d)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for s in range(k):
            t = fmt(traj.spec.node_time(s))
            for i in range(n):
                w.writerow([s, t, i] + [fmt(x) for x in traj.values[s, i]])


def read_trajectory_csv(path):
    """Returns ``(values, times)``; ``values`` has shape ``(k, N, d)``."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty trajectory file")
    header = rows[0]
    d = len(header) - 3
    if header[:3] != ["s", "t", "body"] or d < 1 or header[3:] != [f"c{c}" for c in range(d)]:
        raise ValueError(f"{path}: bad header {header}")
    body = rows[1:]
    if not body:
        raise ValueError(f"{path}: trajectory has no rows")
    try:
        s_idx = [int(r[0]) for r in body]
        b_idx = [int(r[2]) for r in body]
        coords = np.array([[float(x) for x in r[3:]] for r in body])
        times = [float(r[1]) for r in body]
    except (ValueError, IndexError) as exc:
        raise ValueError(f"{path}: malformed row: {exc}") from exc
    k, n = max(s_idx) + 1, max(b_idx) + 1
    if coords.shape != (k * n, d) or len(body) != k * n:
        raise ValueError(f"{path}: expected {k * n} rows of {d} coordinates")
    values = np.empty((k, n, d))
    seen = np.zeros((k, n), dtype=bool)
    t_nodes = np.empty(k)
    for row, (s, i) in enumerate(zip(s_idx, b_idx)):
        if s < 0 or i < 0 or seen[s, i]:
            raise ValueError(f"{path}: duplicate or negative index at row {row + 2}")
        seen[s, i] = True
        values[s, i] = coords[row]
        t_nodes[s] = times[row]
    return values, t_nodes


def load_trajectory(path, problem: ProblemSpec) -> Trajectory:
    values, _ = read_trajectory_csv(path)
    if values.shape != problem.shape:
        raise SpecError(f"{path}: trajectory shape {values.shape} does not match "
                        f"config shape {problem.shape}")
    return Trajectory(values, problem)


def report_lines(report: OrbitReport) -> list[str]:
    p, sym, cfg = report.problem, report.symmetry, report.config
    sep = report.min_sep
    blocks = ";".join(f"{b.width}/{b.divisor}" for b in sym.blocks)
    items = [
        ("j", fmt(report.j)),
        ("grad_norm", fmt(report.grad_norm)),
        ("grad_tol", fmt(report.grad_tol)),
        ("iters", report.iters),
        ("converged", str(report.converged).lower()),
        ("reason", report.reason),
        ("min_sep", fmt(sep.r)),
        ("min_sep_node", sep.s),
        ("min_sep_pair", f"{sep.i},{sep.l}"),
        ("energy_mean", fmt(report.energy_mean)),
        ("energy_max_dev", fmt(report.energy_max_dev)),
        ("residual_norm", fmt(report.residual_norm)),
        ("j_drift", fmt(report.j_drift)),
        ("n_bodies", p.n_bodies),
        ("dim", p.dim),
        ("masses", ",".join(fmt(m) for m in p.masses)),
        ("alpha", fmt(p.alpha)),
        ("period", fmt(p.period)),
        ("k", p.k),
        ("delta", fmt(p.delta)),
        ("blocks", blocks),
        ("max_iters", cfg.max_iters),
        ("step_init", fmt(cfg.step_init)),
        ("armijo_c", fmt(cfg.armijo_c)),
        ("backtrack", fmt(cfg.backtrack)),
        ("step_floor", fmt(cfg.step_floor)),
        ("init_radius", fmt(cfg.init_radius)),
        ("seed", cfg.seed),
        ("prng", PRNG_NAME),
    ]
    return [f"{k}={v}" for k, v in items]


def write_report(report: OrbitReport, path) -> None:
    Path(path).write_text("\n".join(report_lines(report)) + "\n")


def read_report(path) -> dict:
    out = {}
    for line in Path(path).read_text().splitlines():
        if "=" in line:
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def index_rows(results):
    """Rows ``(seed, report_or_None)`` sorted by J ascending, then seed."""
    def key(item):
        seed, rep = item
        j = rep.j if rep is not None and math.isfinite(rep.j) else math.inf
        return (j, seed)
    return sorted(results, key=key)


def write_index(results, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["rank", "seed", "j", "converged", "reason", "iters", "grad_norm",
                    "min_sep", "trajectory"])
        for rank, (seed, rep) in enumerate(index_rows(results)):
            if rep is None:
                w.writerow([rank, seed, "nan", "false", "initial_collision", 0, "nan", "nan", ""])
                continue
            w.writerow([rank, seed, fmt(rep.j), str(rep.converged).lower(), rep.reason,
                        rep.iters, fmt(rep.grad_norm), fmt(rep.min_sep.r),
                        os.path.basename(run_stem(seed)) + ".csv"])


def run_stem(seed: int) -> str:
    return f"run_{seed:05d}"
