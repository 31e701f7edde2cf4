"""Minimal self-contained SVG line charts, linear or logarithmic y axis.

Kept dependency-free on purpose: result figures must be reviewable without
any plotting stack installed.
"""

from __future__ import annotations

import math
from typing import Optional

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"]
MARKERS = ["circle", "square", "diamond", "triangle"]

WIDTH, HEIGHT = 840, 520
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 80, 170, 48, 64


class Series:
    def __init__(self, label: str, points):
        self.label = label
        self.points = list(points)


def _nice_ticks(lo: float, hi: float, target: int = 6):
    if hi <= lo:
        hi = lo + 1.0
    span = hi - lo
    step = 10 ** math.floor(math.log10(span / target))
    for mult in (1, 2, 5, 10, 20, 50):
        if span / (step * mult) <= target:
            step *= mult
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + step * 1e-9:
        ticks.append(round(t, 12))
        t += step
    return ticks


def _fmt(value: float) -> str:
    if value == 0:
        return "0"
    if abs(value) >= 1000 or abs(value) < 0.01:
        return f"{value:.0e}".replace("e-0", "e-").replace("e+0", "e")
    return f"{value:g}"


def _marker(shape: str, x: float, y: float, color: str) -> str:
    if shape == "circle":
        return f'<circle cx="{x:.1f}" cy="{y:.1f}" r="3.5" fill="{color}"/>'
    if shape == "square":
        return f'<rect x="{x - 3:.1f}" y="{y - 3:.1f}" width="6" height="6" fill="{color}"/>'
    if shape == "diamond":
        return (
            f'<path d="M {x:.1f} {y - 4:.1f} L {x + 4:.1f} {y:.1f} '
            f'L {x:.1f} {y + 4:.1f} L {x - 4:.1f} {y:.1f} Z" fill="{color}"/>'
        )
    return (
        f'<path d="M {x:.1f} {y - 4:.1f} L {x + 4:.1f} {y + 3:.1f} '
        f'L {x - 4:.1f} {y + 3:.1f} Z" fill="{color}"/>'
    )


def render_chart(
    series,
    path,
    *,
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    ylog: bool = False,
    x_min: Optional[float] = None,
    x_max: Optional[float] = None,
) -> None:
    """Write one chart with the given series to ``path`` as SVG.

    On a log axis, points with non-positive y are dropped from the drawing
    (they have no finite position); if that would drop everything, the chart
    falls back to a linear axis.  A series reduced to a single point is
    drawn as a marker.
    """
    if ylog and not any(y is not None and y > 0 for s in series for _, y in s.points):
        ylog = False
    drawable = []
    for s in series:
        pts = [(x, y) for x, y in s.points if y is not None and (not ylog or y > 0)]
        drawable.append(Series(s.label, pts))
    all_pts = [p for s in drawable for p in s.points]
    if not all_pts:
        raise ValueError("no drawable points")

    xs = [p[0] for p in all_pts]
    ys = [p[1] for p in all_pts]
    lo_x = x_min if x_min is not None else min(xs)
    hi_x = x_max if x_max is not None else max(xs)
    if hi_x <= lo_x:
        lo_x, hi_x = lo_x - 0.5, hi_x + 0.5
    if ylog:
        lo_y = math.floor(math.log10(min(ys)))
        hi_y = math.ceil(math.log10(max(ys)))
        if hi_y <= lo_y:
            hi_y = lo_y + 1
    else:
        lo_y = min(0.0, min(ys))
        hi_y = max(ys)
        if hi_y <= lo_y:
            hi_y = lo_y + 1.0

    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B

    def sx(x: float) -> float:
        return MARGIN_L + (x - lo_x) / (hi_x - lo_x) * plot_w

    def sy(y: float) -> float:
        if ylog:
            frac = (math.log10(y) - lo_y) / (hi_y - lo_y)
        else:
            frac = (y - lo_y) / (hi_y - lo_y)
        return MARGIN_T + (1.0 - frac) * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="13">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="#333"/>',
    ]
    if title:
        out.append(
            f'<text x="{WIDTH / 2:.0f}" y="28" text-anchor="middle" font-size="16">{title}</text>'
        )

    # y grid and ticks
    if ylog:
        y_ticks = [10.0**d for d in range(int(lo_y), int(hi_y) + 1)]
    else:
        y_ticks = _nice_ticks(lo_y, hi_y)
    for t in y_ticks:
        y = sy(t)
        out.append(
            f'<line x1="{MARGIN_L}" y1="{y:.1f}" x2="{MARGIN_L + plot_w}" y2="{y:.1f}" '
            'stroke="#ddd"/>'
        )
        out.append(
            f'<text x="{MARGIN_L - 8}" y="{y + 4:.1f}" text-anchor="end">{_fmt(t)}</text>'
        )
    # x ticks
    for t in _nice_ticks(lo_x, hi_x):
        x = sx(t)
        out.append(
            f'<line x1="{x:.1f}" y1="{MARGIN_T + plot_h}" x2="{x:.1f}" '
            f'y2="{MARGIN_T + plot_h + 5}" stroke="#333"/>'
        )
        out.append(
            f'<text x="{x:.1f}" y="{MARGIN_T + plot_h + 20}" text-anchor="middle">{_fmt(t)}</text>'
        )
    if xlabel:
        out.append(
            f'<text x="{MARGIN_L + plot_w / 2:.0f}" y="{HEIGHT - 16}" '
            f'text-anchor="middle">{xlabel}</text>'
        )
    if ylabel:
        out.append(
            f'<text x="22" y="{MARGIN_T + plot_h / 2:.0f}" text-anchor="middle" '
            f'transform="rotate(-90 22 {MARGIN_T + plot_h / 2:.0f})">{ylabel}</text>'
        )

    for idx, s in enumerate(drawable):
        if not s.points:
            continue
        color = PALETTE[idx % len(PALETTE)]
        marker = MARKERS[idx % len(MARKERS)]
        coords = [(sx(x), sy(y)) for x, y in sorted(s.points)]
        if len(coords) > 1:
            path_d = " ".join(f"{x:.1f},{y:.1f}" for x, y in coords)
            out.append(
                f'<polyline points="{path_d}" fill="none" stroke="{color}" stroke-width="1.8"/>'
            )
        for x, y in coords:
            out.append(_marker(marker, x, y, color))
        ly = MARGIN_T + 10 + idx * 20
        lx = MARGIN_L + plot_w + 14
        out.append(
            f'<line x1="{lx}" y1="{ly}" x2="{lx + 22}" y2="{ly}" stroke="{color}" '
            'stroke-width="1.8"/>'
        )
        out.append(_marker(marker, lx + 11, ly, color))
        out.append(f'<text x="{lx + 28}" y="{ly + 4}">{s.label}</text>')

    out.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(out) + "\n")
