"""Minimal SVG line charts for benchmark CSV files."""

from __future__ import annotations

import csv
import math
from collections import defaultdict
from pathlib import Path
from typing import Union
from xml.sax.saxutils import escape

KINDS = {
    # kind: (x column, y column, log-scale x, title, x label, y label)
    "runtime": ("n", "wall_time", False, "Wall time vs ground-set size", "n", "seconds"),
    "iterations": ("F", "total", True, "Wolfe iterations vs F", "F (log scale)", "iterations"),
}

W, H = 640, 420
ML, MR, MT, MB = 70, 20, 40, 55


class PlotError(ValueError):
    pass


def read_bench_csv(path: Union[str, Path]) -> list:
    lines = [ln for ln in Path(path).read_text().splitlines() if ln and not ln.startswith("#")]
    if not lines:
        raise PlotError(f"{path}: no header row")
    return list(csv.DictReader(lines))


def series(rows: list, kind: str):
    """Mean y per distinct x, sorted by x."""
    xcol, ycol, logx = KINDS[kind][:3]
    if not rows:
        raise PlotError("no data rows")
    missing = {xcol, ycol} - set(rows[0])
    if missing:
        raise PlotError(f"CSV lacks column(s) {sorted(missing)} needed for a {kind} plot")
    groups = defaultdict(list)
    for k, row in enumerate(rows):
        try:
            x, y = float(row[xcol]), float(row[ycol])
        except (TypeError, ValueError):
            raise PlotError(f"row {k + 1}: non-numeric {xcol}/{ycol}") from None
        if logx and x <= 0:
            raise PlotError(f"row {k + 1}: {xcol} must be positive on a log axis")
        groups[x].append(y)
    xs = sorted(groups)
    return xs, [sum(groups[x]) / len(groups[x]) for x in xs]


def _ticks(lo: float, hi: float, count: int = 5) -> list:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    out = []
    v = start
    while v <= hi + 1e-9 * step:
        out.append(v)
        v += step
    return out


def render_svg(xs: list, ys: list, kind: str) -> str:
    _, _, logx, title, xlabel, ylabel = KINDS[kind]
    tx = [math.log10(x) for x in xs] if logx else list(xs)
    x0, x1 = min(tx), max(tx)
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    y0, y1 = 0.0, max(ys) * 1.1 or 1.0
    pw, ph = W - ML - MR, H - MT - MB

    def px(v):
        return ML + (v - x0) / (x1 - x0) * pw

    def py(v):
        return MT + ph - (v - y0) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
           f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">',
           f'<rect width="{W}" height="{H}" fill="white"/>',
           f'<text x="{W / 2}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
           f'<line x1="{ML}" y1="{MT + ph}" x2="{ML + pw}" y2="{MT + ph}" stroke="black"/>',
           f'<line x1="{ML}" y1="{MT}" x2="{ML}" y2="{MT + ph}" stroke="black"/>']
    if logx:
        xt = list(range(math.ceil(x0), math.floor(x1) + 1)) or [x0]
        labels = [f"1e{int(v)}" if float(v).is_integer() else f"{10 ** v:.3g}" for v in xt]
    else:
        xt = _ticks(x0, x1)
        labels = [f"{v:g}" for v in xt]
    for v, lab in zip(xt, labels):
        X = px(v)
        out.append(f'<line x1="{X:.1f}" y1="{MT + ph}" x2="{X:.1f}" y2="{MT + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{X:.1f}" y="{MT + ph + 18}" text-anchor="middle">{lab}</text>')
    for v in _ticks(y0, y1):
        Y = py(v)
        out.append(f'<line x1="{ML - 5}" y1="{Y:.1f}" x2="{ML}" y2="{Y:.1f}" stroke="black"/>')
        out.append(f'<line x1="{ML}" y1="{Y:.1f}" x2="{ML + pw}" y2="{Y:.1f}" stroke="#ddd"/>')
        out.append(f'<text x="{ML - 8}" y="{Y + 4:.1f}" text-anchor="end">{v:g}</text>')
    pts = " ".join(f"{px(a):.1f},{py(b):.1f}" for a, b in zip(tx, ys))
    out.append(f'<polyline points="{pts}" fill="none" stroke="#1f77b4" stroke-width="2"/>')
    for a, b in zip(tx, ys):
        out.append(f'<circle cx="{px(a):.1f}" cy="{py(b):.1f}" r="3" fill="#1f77b4"/>')
    out.append(f'<text x="{ML + pw / 2}" y="{H - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{MT + ph / 2}" text-anchor="middle" '
               f'transform="rotate(-90 16 {MT + ph / 2})">{escape(ylabel)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def plot_csv(csv_path, kind: str, out_path) -> None:
    """Render ``csv_path`` to ``out_path``; nothing is written on error."""
    if kind not in KINDS:
        raise PlotError(f"unknown plot kind {kind!r}")
    xs, ys = series(read_bench_csv(csv_path), kind)
    svg = render_svg(xs, ys, kind)
    Path(out_path).write_text(svg)
