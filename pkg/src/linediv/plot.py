"""Dependency-free SVG rendering of a 2-D run: objective heatmap plus solutions."""

from __future__ import annotations

import logging
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

log = logging.getLogger("linediv")

SIZE = 480
MARGIN = 56
RADIUS = 4.0


def _gray_levels(spec, grid: int) -> np.ndarray:
    """(grid, grid) array of 0..255 gray levels, row 0 at the top (max x2)."""
    b = spec.bounds
    xs = np.linspace(b.lower[0], b.upper[0], grid)
    ys = np.linspace(b.upper[1], b.lower[1], grid)
    gx, gy = np.meshgrid(xs, ys)
    # a private counter keeps plotting out of the run's evaluation tally
    values = spec.fresh().evaluate_batch(np.column_stack([gx.ravel(), gy.ravel()])).reshape(grid, grid)
    lo, hi = float(values.min()), float(values.max())
    span = hi - lo if hi > lo else 1.0
    return np.rint(255.0 * (values - lo) / span).astype(int)


def svg_text(report, spec, grid: int = 200) -> str:
    if spec.dim != 2:
        raise ValueError("SVG plots need a 2-D problem")
    b = spec.bounds
    cell = SIZE / grid
    levels = _gray_levels(spec, grid)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE + 2 * MARGIN}" '
        f'height="{SIZE + 2 * MARGIN}" viewBox="0 0 {SIZE + 2 * MARGIN} {SIZE + 2 * MARGIN}">',
        f"<title>{escape(spec.name)} repetition {report.repetition}</title>",
        '<g id="heatmap" shape-rendering="crispEdges">',
    ]
    # merge equal-gray runs along each row to keep the file small
    for r in range(grid):
        row = levels[r]
        start = 0
        for c in range(1, grid + 1):
            if c == grid or row[c] != row[start]:
                g = row[start]
                out.append(f'<rect x="{MARGIN + start * cell:.3f}" y="{MARGIN + r * cell:.3f}" '
                           f'width="{(c - start) * cell:.3f}" height="{cell:.3f}" fill="rgb({g},{g},{g})"/>')
                start = c
    out.append("</g>")

    def to_px(p):
        u = (p[0] - b.lower[0]) / (b.upper[0] - b.lower[0])
        v = (p[1] - b.lower[1]) / (b.upper[1] - b.lower[1])
        return MARGIN + u * SIZE, MARGIN + (1.0 - v) * SIZE

    out.append('<g id="local-optima" fill="#d62728" stroke="#000000" stroke-width="1">')
    for s in sorted(report.final_LP, key=lambda s: s.id):
        x, y = to_px(s.point)
        out.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="{RADIUS}"/>')
    out.append("</g>")
    out.append('<g id="population" fill="none" stroke="#1f77b4" stroke-width="1.5">')
    for s in sorted(report.final_P, key=lambda s: s.id):
        x, y = to_px(s.point)
        out.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="{RADIUS}"/>')
    out.append("</g>")

    lo0, hi0, lo1, hi1 = (f"{v:g}" for v in (b.lower[0], b.upper[0], b.lower[1], b.upper[1]))
    out += [
        f'<rect x="{MARGIN}" y="{MARGIN}" width="{SIZE}" height="{SIZE}" fill="none" stroke="#000000"/>',
        '<g font-family="sans-serif" font-size="12" fill="#000000">',
        f'<text x="{MARGIN}" y="{MARGIN + SIZE + 18}" text-anchor="start">{lo0}</text>',
        f'<text x="{MARGIN + SIZE}" y="{MARGIN + SIZE + 18}" text-anchor="end">{hi0}</text>',
        f'<text x="{MARGIN + SIZE / 2}" y="{MARGIN + SIZE + 36}" text-anchor="middle">x1</text>',
        f'<text x="{MARGIN - 6}" y="{MARGIN + SIZE}" text-anchor="end">{lo1}</text>',
        f'<text x="{MARGIN - 6}" y="{MARGIN + 12}" text-anchor="end">{hi1}</text>',
        f'<text x="{MARGIN - 36}" y="{MARGIN + SIZE / 2}" text-anchor="middle">x2</text>',
        "</g>",
        "</svg>",
    ]
    return "\n".join(out) + "\n"


def emit_plot(report, spec, path, grid: int = 200) -> bool:
    """Write the SVG for ``report``; returns False (with a warning) unless 2-D."""
    if spec.dim != 2:
        log.warning("plot skipped: problem has dimension %d, need 2", spec.dim)
        return False
    from linediv.cli import _atomic_write

    _atomic_write(Path(path), svg_text(report, spec, grid))
    return True
