"""Small hand-rolled SVG line charts.

No plotting dependency: the figures are single polylines with axes and
tick labels, and the output bytes must be deterministic. Coordinates are
emitted at fixed precision so identical inputs give identical files.
"""

from __future__ import annotations

import math
from typing import Sequence

from .errors import InvalidArgumentError

__all__ = ["line_chart"]

_WIDTH = 640
_HEIGHT = 440
_MARGIN_LEFT = 72
_MARGIN_RIGHT = 24
_MARGIN_TOP = 40
_MARGIN_BOTTOM = 56
_TICKS = 5


def _nice_ticks(lo: float, hi: float) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw_step = (hi - lo) / (_TICKS - 1)
    magnitude = 10.0 ** math.floor(math.log10(raw_step))
    for factor in (1.0, 2.0, 2.5, 5.0, 10.0):
        step = factor * magnitude
        if step >= raw_step:
            break
    first = math.ceil(lo / step) * step
    ticks = []
    value = first
    while value <= hi + step * 1e-9:
        ticks.append(0.0 if abs(value) < step * 1e-9 else value)
        value += step
    return ticks


def _fmt_tick(value: float) -> str:
    text = f"{value:.6f}".rstrip("0").rstrip(".")
    return text or "0"


def line_chart(points: Sequence[tuple[float, float]], *, title: str,
               x_label: str, y_label: str,
               marker: tuple[float, float] | None = None) -> str:
    """Render one series as an SVG document string."""
    if len(points) < 2:
        raise InvalidArgumentError("a line chart needs at least two points")
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys + [0.0]), max(ys)
    if x_hi <= x_lo:
        raise InvalidArgumentError("x range is degenerate")
    if y_hi <= y_lo:
        y_hi = y_lo + 1.0

    plot_w = _WIDTH - _MARGIN_LEFT - _MARGIN_RIGHT
    plot_h = _HEIGHT - _MARGIN_TOP - _MARGIN_BOTTOM

    def sx(x: float) -> float:
        return _MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y: float) -> float:
        return _MARGIN_TOP + (y_hi - y) / (y_hi - y_lo) * plot_h

    parts: list[str] = []
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
        f'height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}">')
    parts.append(f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>')
    parts.append(
        f'<text x="{_WIDTH / 2:.1f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{title}</text>')

    axis_y = _MARGIN_TOP + plot_h
    parts.append(
        f'<line x1="{_MARGIN_LEFT}" y1="{axis_y}" '
        f'x2="{_MARGIN_LEFT + plot_w}" y2="{axis_y}" stroke="black"/>')
    parts.append(
        f'<line x1="{_MARGIN_LEFT}" y1="{_MARGIN_TOP}" '
        f'x2="{_MARGIN_LEFT}" y2="{axis_y}" stroke="black"/>')

    for tick in _nice_ticks(x_lo, x_hi):
        px = sx(tick)
        parts.append(f'<line x1="{px:.2f}" y1="{axis_y}" x2="{px:.2f}" '
                     f'y2="{axis_y + 5}" stroke="black"/>')
        parts.append(
            f'<text x="{px:.2f}" y="{axis_y + 20}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{_fmt_tick(tick)}</text>')
    for tick in _nice_ticks(y_lo, y_hi):
        py = sy(tick)
        parts.append(f'<line x1="{_MARGIN_LEFT - 5}" y1="{py:.2f}" '
                     f'x2="{_MARGIN_LEFT}" y2="{py:.2f}" stroke="black"/>')
        parts.append(
            f'<text x="{_MARGIN_LEFT - 8}" y="{py + 4:.2f}" '
            f'text-anchor="end" font-family="sans-serif" '
            f'font-size="12">{_fmt_tick(tick)}</text>')

    parts.append(
        f'<text x="{_MARGIN_LEFT + plot_w / 2:.1f}" y="{_HEIGHT - 12}" '
        f'text-anchor="middle" font-family="sans-serif" '
        f'font-size="13">{x_label}</text>')
    parts.append(
        f'<text x="18" y="{_MARGIN_TOP + plot_h / 2:.1f}" '
        f'text-anchor="middle" font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 18 {_MARGIN_TOP + plot_h / 2:.1f})">'
        f'{y_label}</text>')

    coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in points)
    parts.append(f'<polyline points="{coords}" fill="none" '
                 f'stroke="#1f4e9c" stroke-width="1.5"/>')

    if marker is not None:
        mx, my = marker
        parts.append(f'<circle cx="{sx(mx):.2f}" cy="{sy(my):.2f}" r="4" '
                     f'fill="#c23b21"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
