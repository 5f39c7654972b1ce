"""Static SVG step plot of a saturation curve.

Hand-rolled rather than delegated to a plotting library so that repeated
runs on the same input produce byte-identical files (no embedded ids,
timestamps, or library version strings).  The plot shows the
right-continuous estimate as a step line, the confidence band as a
shaded step region, and any extrapolated zero crossings as dashed lines
from the last event point.
"""

from __future__ import annotations

import math

from .survival import KMCurve, SaturationSummary, fit_line

__all__ = ["render_curve_svg"]

WIDTH = 720
HEIGHT = 440
MARGIN_LEFT = 64
MARGIN_RIGHT = 24
MARGIN_TOP = 24
MARGIN_BOTTOM = 56

LINE_COLOR = "#1f5fa8"
BAND_COLOR = "#1f5fa8"
KM_EXTRAP_COLOR = "#777777"
CI_EXTRAP_COLOR = "#b03030"


def _fmt(value: float) -> str:
    return f"{value:.2f}".rstrip("0").rstrip(".")


def render_curve_svg(curve: KMCurve, summary: SaturationSummary | None = None, title: str = "") -> str:
    """Render the curve (and optional landmarks) to an SVG document string."""
    last_seq = curve.points[-1].seq
    x_max = float(last_seq)
    for landmark in (
        summary.km_extrapolated_zero if summary else None,
        summary.upper_ci_extrapolated_zero if summary else None,
    ):
        if landmark is not None and math.isfinite(landmark):
            x_max = max(x_max, landmark)
    x_max = max(1.0, math.ceil(x_max))

    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def sx(x: float) -> float:
        return MARGIN_LEFT + plot_w * (x / x_max)

    def sy(y: float) -> float:
        return MARGIN_TOP + plot_h * (1.0 - y)

    def step_path(values: list[tuple[int, float]], start_y: float) -> str:
        cmds = [f"M {_fmt(sx(0))} {_fmt(sy(start_y))}"]
        y = start_y
        for seq, v in values:
            cmds.append(f"H {_fmt(sx(seq))}")
            if v != y:
                cmds.append(f"V {_fmt(sy(v))}")
                y = v
        return " ".join(cmds)

    parts: list[str] = []
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">'
    )
    parts.append(f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>')
    if title:
        parts.append(
            f'<text x="{WIDTH / 2:.0f}" y="16" text-anchor="middle" font-size="14">{_escape(title)}</text>'
        )

    # Confidence band over the prefix where the interval is estimable.
    banded = [(p.seq, p.ci_low, p.ci_high) for p in curve.points if p.ci_low is not None]
    if banded:
        upper = [f"M {_fmt(sx(0))} {_fmt(sy(1.0))}"]
        y = 1.0
        for seq, _, hi in banded:
            upper.append(f"H {_fmt(sx(seq))}")
            if hi != y:
                upper.append(f"V {_fmt(sy(hi))}")
                y = hi
        lower = []
        y = None
        for seq, lo, _ in reversed(banded):
            if y is None:
                lower.append(f"L {_fmt(sx(seq))} {_fmt(sy(lo))}")
            else:
                if lo != y:
                    lower.append(f"V {_fmt(sy(lo))}")
                lower.append(f"H {_fmt(sx(seq - 1))}")
            y = lo
        lower.append(f"H {_fmt(sx(0))}")
        lower.append(f"V {_fmt(sy(1.0))}")
        parts.append(
            f'<path d="{" ".join(upper + lower)} Z" fill="{BAND_COLOR}" fill-opacity="0.15" stroke="none"/>'
        )

    # Step line of the estimate itself.
    line = step_path([(p.seq, p.survival) for p in curve.points], start_y=1.0)
    parts.append(f'<path d="{line}" fill="none" stroke="{LINE_COLOR}" stroke-width="2"/>')

    # Censoring ticks.
    for p in curve.points:
        if not p.event:
            x = sx(p.seq)
            y = sy(p.survival)
            parts.append(
                f'<line x1="{_fmt(x)}" y1="{_fmt(y - 5)}" x2="{_fmt(x)}" y2="{_fmt(y + 5)}" '
                f'stroke="{LINE_COLOR}" stroke-width="1.5"/>'
            )

    # Dashed extrapolation lines, drawn along the fitted least squares line
    # from the last usable event point to the x-axis crossing.
    if summary is not None:
        events = curve.event_points()
        if summary.km_extrapolated_zero is not None:
            pts = [(p.seq, p.survival) for p in events]
            parts.append(_extrapolation_line(pts, summary.km_extrapolated_zero, sx, sy, KM_EXTRAP_COLOR))
        if summary.upper_ci_extrapolated_zero is not None:
            pts = [(p.seq, p.ci_high) for p in events if p.ci_high is not None]
            parts.append(
                _extrapolation_line(pts, summary.upper_ci_extrapolated_zero, sx, sy, CI_EXTRAP_COLOR)
            )

    parts.extend(_axes(sx, sy, x_max))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _extrapolation_line(points, x_intercept: float, sx, sy, color: str) -> str:
    slope, intercept = fit_line(points)
    x0 = points[-1][0]
    y0 = slope * x0 + intercept
    return (
        f'<line x1="{_fmt(sx(x0))}" y1="{_fmt(sy(y0))}" x2="{_fmt(sx(x_intercept))}" y2="{_fmt(sy(0.0))}" '
        f'stroke="{color}" stroke-width="1.5" stroke-dasharray="6 4"/>'
    )


def _axes(sx, sy, x_max: float) -> list[str]:
    parts = []
    x0, y0 = sx(0), sy(0)
    x1, y1 = sx(x_max), sy(1)
    parts.append(f'<line x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x1)}" y2="{_fmt(y0)}" stroke="black"/>')
    parts.append(f'<line x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x0)}" y2="{_fmt(y1)}" stroke="black"/>')
    step = max(1, int(math.ceil(x_max / 12)))
    tick = 0
    while tick <= x_max:
        x = sx(tick)
        parts.append(f'<line x1="{_fmt(x)}" y1="{_fmt(y0)}" x2="{_fmt(x)}" y2="{_fmt(y0 + 5)}" stroke="black"/>')
        parts.append(f'<text x="{_fmt(x)}" y="{_fmt(y0 + 20)}" text-anchor="middle">{tick}</text>')
        tick += step
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = sy(frac)
        parts.append(f'<line x1="{_fmt(x0 - 5)}" y1="{_fmt(y)}" x2="{_fmt(x0)}" y2="{_fmt(y)}" stroke="black"/>')
        parts.append(f'<text x="{_fmt(x0 - 9)}" y="{_fmt(y + 4)}" text-anchor="end">{frac:g}</text>')
    parts.append(
        f'<text x="{_fmt((x0 + x1) / 2)}" y="{HEIGHT - 12}" text-anchor="middle">interview</text>'
    )
    parts.append(
        f'<text x="16" y="{_fmt((sy(0) + sy(1)) / 2)}" text-anchor="middle" '
        f'transform="rotate(-90 16 {_fmt((sy(0) + sy(1)) / 2)})">probability not saturated</text>'
    )
    return parts


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
