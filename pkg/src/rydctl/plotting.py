"""Minimal deterministic SVG line plots.

Numbers are written with fixed precision and series keep their input order,
so identical inputs give byte-identical documents.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence
from xml.sax.saxutils import escape

import numpy as np

from .errors import InputError

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=70, right=20, top=20, bottom=50)
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")


class Series(NamedTuple):
    x: np.ndarray
    y: np.ndarray
    label: str = ""


def _ticks(lo: float, hi: float, log: bool) -> list[float]:
    if log:
        return [10.0**k for k in range(math.ceil(lo), math.floor(hi) + 1)]
    span = hi - lo
    raw = span / 5
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    return [start + i * step for i in range(int((hi - start) / step + 1e-9) + 1)]


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def render_svg(series: Sequence[Series], xlabel: str = "", ylabel: str = "", title: str = "",
               logx: bool = False, logy: bool = False) -> str:
    """SVG document with one polyline per series and a legend for labelled series.

    Points that are non-finite, or non-positive on a log axis, are dropped.
    """
    if not series:
        raise InputError("nothing to plot")
    cleaned = []
    for s in series:
        x, y = np.asarray(s.x, dtype=float), np.asarray(s.y, dtype=float)
        if x.shape != y.shape or x.size < 2:
            raise InputError("each series needs at least 2 points and matching x, y")
        keep = np.isfinite(x) & np.isfinite(y)
        if logx:
            keep &= x > 0
        if logy:
            keep &= y > 0
        x, y = x[keep], y[keep]
        if x.size < 2:
            raise InputError(f"series {s.label!r} has fewer than 2 plottable points")
        cleaned.append(Series(np.log10(x) if logx else x, np.log10(y) if logy else y, s.label))

    xs = np.concatenate([s.x for s in cleaned])
    ys = np.concatenate([s.y for s in cleaned])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(x):
        return MARGIN["left"] + (x - x0) / (x1 - x0) * pw

    def py(y):
        return MARGIN["top"] + (y1 - y) / (y1 - y0) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{pw}" height="{ph}" '
        'fill="none" stroke="black"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2:.0f}" y="14" text-anchor="middle">{escape(title)}</text>')
    for t in _ticks(x0, x1, logx):
        label = f"1e{t:.0f}" if logx else f"{t:g}"
        out.append(f'<line x1="{_fmt(px(t))}" y1="{MARGIN["top"] + ph}" x2="{_fmt(px(t))}" '
                   f'y2="{MARGIN["top"] + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{_fmt(px(t))}" y="{MARGIN["top"] + ph + 18}" '
                   f'text-anchor="middle">{escape(label)}</text>')
    for t in _ticks(y0, y1, logy):
        label = f"1e{t:.0f}" if logy else f"{t:.4g}"
        out.append(f'<line x1="{MARGIN["left"] - 5}" y1="{_fmt(py(t))}" x2="{MARGIN["left"]}" '
                   f'y2="{_fmt(py(t))}" stroke="black"/>')
        out.append(f'<text x="{MARGIN["left"] - 8}" y="{_fmt(py(t) + 4)}" '
                   f'text-anchor="end">{escape(label)}</text>')
    if xlabel:
        out.append(f'<text x="{MARGIN["left"] + pw / 2:.0f}" y="{HEIGHT - 10}" '
                   f'text-anchor="middle">{escape(xlabel)}</text>')
    if ylabel:
        out.append(f'<text x="16" y="{MARGIN["top"] + ph / 2:.0f}" text-anchor="middle" '
                   f'transform="rotate(-90 16 {MARGIN["top"] + ph / 2:.0f})">{escape(ylabel)}</text>')
    for i, s in enumerate(cleaned):
        pts = " ".join(f"{_fmt(px(a))},{_fmt(py(b))}" for a, b in zip(s.x, s.y))
        out.append(f'<polyline fill="none" stroke="{COLORS[i % len(COLORS)]}" '
                   f'stroke-width="1.5" points="{pts}"/>')
    labelled = [(i, s.label) for i, s in enumerate(cleaned) if s.label]
    for row, (i, label) in enumerate(labelled):
        ly = MARGIN["top"] + 15 + 16 * row
        lx = MARGIN["left"] + pw - 150
        out.append(f'<g class="legend"><line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" '
                   f'stroke="{COLORS[i % len(COLORS)]}" stroke-width="2"/>'
                   f'<text x="{lx + 26}" y="{ly + 4}">{escape(label)}</text></g>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
