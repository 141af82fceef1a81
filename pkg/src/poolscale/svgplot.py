"""Self-contained SVG scaling plots: log-x scatter of frontier points plus fitted curves.

No plotting dependency; the document embeds everything it needs. Fitted
curves are sampled at 200 log-spaced budgets across each frontier's budget
range, and axis bounds cover the data with a 5% margin (log-domain on x,
linear on y).
"""

from __future__ import annotations

import math

from poolscale.fitting import ScalingFit, predict
from poolscale.pareto import Frontier

WIDTH = 800
HEIGHT = 500
MARGIN_LEFT = 70
MARGIN_RIGHT = 160
MARGIN_TOP = 40
MARGIN_BOTTOM = 55
CURVE_SAMPLES = 200
PALETTE = ["#1f6fb2", "#d35f2b", "#3a8a3a", "#8c4fb0", "#b23a48", "#6b6b6b"]


def _fmt(x: float) -> str:
    return format(x, ".6g")


def curve_budgets(frontier: Frontier) -> list[float]:
    """200 log-spaced budgets spanning the frontier's budget range."""
    lo = math.log10(min(p.total_params_billions for p in frontier))
    hi = math.log10(max(p.total_params_billions for p in frontier))
    if lo == hi:
        return [10**lo] * CURVE_SAMPLES
    step = (hi - lo) / (CURVE_SAMPLES - 1)
    return [10 ** (lo + i * step) for i in range(CURVE_SAMPLES)]


def emit_svg_plot(
    series: list[tuple[str, Frontier, ScalingFit | None]],
    title: str = "Oracle loss vs total parameters",
) -> str:
    """Render labeled frontiers (scatter) and their fitted curves (polylines) as one SVG."""
    if not series:
        raise ValueError("empty point set: no series to plot")

    drawable = [(label, fr, fit) for label, fr, fit in series if len(fr) > 0]
    warnings = [label for label, fr, _ in series if len(fr) == 0]

    xs: list[float] = []
    ys: list[float] = []
    curves: list[tuple[str, list[tuple[float, float]], str]] = []
    scatters: list[tuple[str, list[tuple[float, float]], str]] = []
    for idx, (label, frontier, fit) in enumerate(drawable):
        color = PALETTE[idx % len(PALETTE)]
        pts = [(p.total_params_billions, p.loss) for p in frontier]
        scatters.append((label, pts, color))
        xs.extend(p for p, _ in pts)
        ys.extend(l for _, l in pts)
        if fit is not None:
            sampled = [(b, predict(fit, b)) for b in curve_budgets(frontier)]
            curves.append((label, sampled, color))
            ys.extend(v for _, v in sampled)

    body: list[str] = []
    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    if xs:
        lx_min, lx_max = math.log10(min(xs)), math.log10(max(xs))
        y_min, y_max = min(ys), max(ys)
        x_pad = 0.05 * (lx_max - lx_min) or 0.5
        y_pad = 0.05 * (y_max - y_min) or 0.5
        lx_min, lx_max = lx_min - x_pad, lx_max + x_pad
        y_min, y_max = y_min - y_pad, y_max + y_pad

        def sx(p: float) -> float:
            return MARGIN_LEFT + (math.log10(p) - lx_min) / (lx_max - lx_min) * plot_w

        def sy(v: float) -> float:
            return MARGIN_TOP + (y_max - v) / (y_max - y_min) * plot_h

        # axes and ticks
        body.append(
            f'<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" '
            'fill="none" stroke="#333" stroke-width="1"/>'
        )
        for i in range(6):
            lx = lx_min + i * (lx_max - lx_min) / 5
            x = MARGIN_LEFT + i * plot_w / 5
            body.append(
                f'<line x1="{_fmt(x)}" y1="{MARGIN_TOP + plot_h}" x2="{_fmt(x)}" '
                f'y2="{MARGIN_TOP + plot_h + 5}" stroke="#333"/>'
            )
            body.append(
                f'<text x="{_fmt(x)}" y="{MARGIN_TOP + plot_h + 20}" font-size="11" '
                f'text-anchor="middle">{_fmt(10 ** lx)}</text>'
            )
            yv = y_min + i * (y_max - y_min) / 5
            y = MARGIN_TOP + plot_h - i * plot_h / 5
            body.append(f'<line x1="{MARGIN_LEFT - 5}" y1="{_fmt(y)}" x2="{MARGIN_LEFT}" y2="{_fmt(y)}" stroke="#333"/>')
            body.append(
                f'<text x="{MARGIN_LEFT - 8}" y="{_fmt(y + 4)}" font-size="11" '
                f'text-anchor="end">{_fmt(yv)}</text>'
            )
        body.append(
            f'<text x="{MARGIN_LEFT + plot_w / 2}" y="{HEIGHT - 12}" font-size="13" '
            'text-anchor="middle">total parameters (billions, log scale)</text>'
        )
        body.append(
            f'<text x="18" y="{MARGIN_TOP + plot_h / 2}" font-size="13" text-anchor="middle" '
            f'transform="rotate(-90 18 {MARGIN_TOP + plot_h / 2})">oracle loss (nats/token)</text>'
        )

        for label, sampled, color in curves:
            coords = " ".join(f"{_fmt(sx(p))},{_fmt(sy(v))}" for p, v in sampled)
            body.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.6"/>')
        for label, pts, color in scatters:
            for p, v in pts:
                body.append(f'<circle cx="{_fmt(sx(p))}" cy="{_fmt(sy(v))}" r="3" fill="{color}"/>')

    # legend
    lx0 = WIDTH - MARGIN_RIGHT + 15
    ly = MARGIN_TOP + 10
    for idx, (label, _, _) in enumerate(drawable):
        color = PALETTE[idx % len(PALETTE)]
        body.append(f'<rect x="{lx0}" y="{ly - 9}" width="12" height="12" fill="{color}"/>')
        body.append(f'<text x="{lx0 + 18}" y="{ly + 2}" font-size="12">{label}</text>')
        ly += 20
    for label in warnings:
        body.append(f'<text x="{lx0}" y="{ly + 2}" font-size="11" fill="#a33">warning: empty frontier: {label}</text>')
        ly += 18

    body.append(f'<text x="{WIDTH / 2}" y="24" font-size="15" text-anchor="middle">{title}</text>')
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">\n<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>\n'
        + "\n".join(body)
        + "\n</svg>\n"
    )
