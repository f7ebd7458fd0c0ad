"""Minimal deterministic SVG line charts.

Output depends only on the input data, so charts can be pinned by golden
files without image comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from .errors import EmptySeries

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


@dataclass
class Series:
    label: str
    x: np.ndarray
    y: np.ndarray


@dataclass
class Axes:
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    xlog: bool = False
    ylog: bool = False
    width: int = 640
    height: int = 420
    ylim: tuple | None = None
    max_points: int = 2000


_MARGIN = (70, 20, 40, 50)  # left, right, top, bottom


def _fmt(v):
    return f"{v:.2f}"


def _tick_label(v):
    return f"{v:.3g}"


def _ticks(lo, hi, log):
    if log:
        a, b = math.floor(lo), math.ceil(hi)
        return [float(k) for k in range(a, b + 1) if lo - 1e-9 <= k <= hi + 1e-9]
    return list(np.linspace(lo, hi, 5))


def _thin(x, y, limit):
    if x.size <= limit:
        return x, y
    idx = np.unique(np.linspace(0, x.size - 1, limit).round().astype(int))
    return x[idx], y[idx]


def render_svg(series, axes: Axes | None = None) -> str:
    """Render ``series`` (a list of :class:`Series`) as a standalone SVG document."""
    axes = axes or Axes()
    series = [s for s in series if np.asarray(s.x).size]
    if not series:
        raise EmptySeries("nothing to plot")

    prepared = []
    for s in series:
        x = np.asarray(s.x, dtype=float)
        y = np.asarray(s.y, dtype=float)
        if x.shape != y.shape:
            raise ValueError(f"series {s.label!r}: x and y lengths differ")
        if axes.xlog:
            if np.any(x <= 0):
                raise ValueError("log x axis needs positive x values")
            x = np.log10(x)
        if axes.ylog:
            if np.any(y <= 0):
                raise ValueError("log y axis needs positive y values")
            y = np.log10(y)
        prepared.append((s.label, *_thin(x, y, axes.max_points)))

    xs = np.concatenate([p[1] for p in prepared])
    ys = np.concatenate([p[2] for p in prepared])
    x0, x1 = float(xs.min()), float(xs.max())
    if axes.ylim is not None:
        y0, y1 = axes.ylim
        if axes.ylog:
            y0, y1 = math.log10(y0), math.log10(y1)
    else:
        y0, y1 = float(ys.min()), float(ys.max())
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5

    left, right, top, bottom = _MARGIN
    pw = axes.width - left - right
    ph = axes.height - top - bottom

    def sx(v):
        return left + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return top + (1.0 - (v - y0) / (y1 - y0)) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{axes.width}" '
        f'height="{axes.height}" viewBox="0 0 {axes.width} {axes.height}">',
        '<style>text{font-family:sans-serif;font-size:11px}'
        '.axis{stroke:#000;fill:none}.grid{stroke:#ddd}'
        'polyline{fill:none;stroke-width:1.2}</style>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" class="axis"/>',
    ]
    if axes.title:
        out.append(f'<text x="{axes.width / 2:.1f}" y="20" text-anchor="middle">'
                   f'{escape(axes.title)}</text>')
    for v in _ticks(x0, x1, axes.xlog):
        px = _fmt(sx(v))
        label = _tick_label(10**v if axes.xlog else v)
        out.append(f'<line x1="{px}" y1="{top}" x2="{px}" y2="{top + ph}" class="grid"/>')
        out.append(f'<text x="{px}" y="{top + ph + 15}" text-anchor="middle">{label}</text>')
    for v in _ticks(y0, y1, axes.ylog):
        py = _fmt(sy(v))
        label = _tick_label(10**v if axes.ylog else v)
        out.append(f'<line x1="{left}" y1="{py}" x2="{left + pw}" y2="{py}" class="grid"/>')
        out.append(f'<text x="{left - 5}" y="{py}" text-anchor="end">{label}</text>')
    if axes.xlabel:
        out.append(f'<text x="{left + pw / 2:.1f}" y="{axes.height - 10}" '
                   f'text-anchor="middle">{escape(axes.xlabel)}</text>')
    if axes.ylabel:
        out.append(f'<text x="15" y="{top + ph / 2:.1f}" text-anchor="middle" '
                   f'transform="rotate(-90 15 {top + ph / 2:.1f})">{escape(axes.ylabel)}</text>')

    for k, (label, x, y) in enumerate(prepared):
        pts = " ".join(f"{_fmt(sx(a))},{_fmt(sy(b))}" for a, b in zip(x, y))
        colour = PALETTE[k % len(PALETTE)]
        out.append(f'<polyline class="series-{k}" stroke="{colour}" points="{pts}">'
                   f'<title>{escape(label)}</title></polyline>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
