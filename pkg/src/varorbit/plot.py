"""Static SVG orbit plots.

Planar trajectories get one panel. Spatial ones get four: x-y (top left),
y-z (top right), z-x (bottom left) and an oblique 3D view (bottom right).
"""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
          "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22")
PANEL = 320
MARGIN = 16


class PlotError(ValueError):
    pass


def caption(masses, j) -> str:
    ms = ",".join(format(float(m), "g") for m in masses)
    return f"m=[{ms}], J={j:.3f}"


def _oblique(q):
    # cabinet-style projection: x right, z up, y receding at 30 degrees
    c, s = math.cos(math.pi / 6), math.sin(math.pi / 6)
    return np.stack([q[..., 0] - 0.5 * c * q[..., 1], q[..., 2] - 0.5 * s * q[..., 1]], axis=-1)


def _panel(xy, x0, y0, label):
    """SVG for one panel; ``xy`` has shape ``(k, N, 2)``."""
    lo = xy.reshape(-1, 2).min(axis=0)
    hi = xy.reshape(-1, 2).max(axis=0)
    span = float(max(hi - lo)) or 1.0
    centre = 0.5 * (lo + hi)
    scale = (PANEL - 2 * MARGIN) / span
    out = [f'<rect x="{x0}" y="{y0}" width="{PANEL}" height="{PANEL}" '
           f'fill="white" stroke="#999" stroke-width="0.5"/>',
           f'<text x="{x0 + 6}" y="{y0 + 14}" font-size="11" fill="#444">{escape(label)}</text>']
    for i in range(xy.shape[1]):
        pts = xy[:, i, :]
        px = x0 + PANEL / 2 + scale * (pts[:, 0] - centre[0])
        py = y0 + PANEL / 2 - scale * (pts[:, 1] - centre[1])
        coords = " ".join(f"{a:.3f},{b:.3f}" for a, b in zip(px, py))
        out.append(f'<polygon points="{coords}" fill="none" '
                   f'stroke="{COLORS[i % len(COLORS)]}" stroke-width="1.2"/>')
    return out


def render_svg(values, title: str | None = None) -> str:
    q = np.asarray(values, dtype=float)
    if q.ndim != 3 or q.shape[0] == 0 or q.shape[1] == 0:
        raise PlotError("nothing to plot: empty trajectory")
    d = q.shape[2]
    if d == 2:
        panels = [(q, 0, 0, "x-y")]
        cols, rows = 1, 1
    elif d == 3:
        panels = [(q[..., [0, 1]], 0, 0, "x-y"), (q[..., [1, 2]], 1, 0, "y-z"),
                  (q[..., [2, 0]], 0, 1, "z-x"), (_oblique(q), 1, 1, "3D")]
        cols, rows = 2, 2
    else:
        raise PlotError(f"plotting supports d=2 or d=3, got d={d}")
    foot = 28 if title else 0
    width, height = cols * PANEL, rows * PANEL + foot
    body = []
    for xy, cx, cy, label in panels:
        body += _panel(xy, cx * PANEL, cy * PANEL, label)
    if title:
        body.append(f'<text x="{width / 2}" y="{rows * PANEL + 19}" font-size="14" '
                    f'text-anchor="middle">{escape(title)}</text>')
    return ("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">\n' + "\n".join(body) + "\n</svg>\n")


def write_svg(values, path, title: str | None = None) -> None:
    with open(path, "w") as fh:
        fh.write(render_svg(values, title))
