"""Tiny deterministic SVG charts (scatter with fitted line, per-run series).

Hand-rolled on purpose: the output must be byte-identical across runs and
platforms so figures can be diffed in tests, which rules out plotting
libraries with version-dependent output. Every coordinate is formatted with
a fixed number of decimals and every color comes from a fixed palette.
"""

from __future__ import annotations

import math
from typing import Mapping, Sequence

from .model import RegressionFit

WIDTH = 640
HEIGHT = 420
MARGIN_LEFT = 62
MARGIN_RIGHT = 24
MARGIN_TOP = 42
MARGIN_BOTTOM = 52

PALETTE = ["#1b6ca8", "#d1495b", "#66a182", "#edae49", "#8d5a97", "#2e4057", "#9a6a4f"]


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _nice_ticks(lo: float, hi: float, target: int = 5) -> tuple[list[float], int]:
    """Round tick positions covering [lo, hi], plus label decimal places."""
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError("tick range must be finite")
    if lo == hi:
        lo, hi = lo - 1.0, hi + 1.0
    span = hi - lo
    raw = span / target
    mag = 10.0 ** math.floor(math.log10(raw))
    step = 10.0 * mag
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if span / (mult * mag) <= target + 0.5:
            step = mult * mag
            break
    first = math.ceil(lo / step - 1e-9)
    last = math.floor(hi / step + 1e-9)
    ticks = [first * step + i * step for i in range(int(last - first) + 1)]
    decimals = max(0, -int(math.floor(math.log10(step) + 1e-9)))
    if abs(step - 2.5 * mag) < 1e-12 * mag:
        decimals += 1
    return ticks, decimals


class _Frame:
    """Maps data coordinates into the plot rectangle."""

    def __init__(self, x_lo: float, x_hi: float, y_lo: float, y_hi: float):
        if x_lo == x_hi:
            x_lo, x_hi = x_lo - 1.0, x_hi + 1.0
        if y_lo == y_hi:
            y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
        self.x_lo, self.x_hi = x_lo, x_hi
        self.y_lo, self.y_hi = y_lo, y_hi
        self.px_lo = MARGIN_LEFT
        self.px_hi = WIDTH - MARGIN_RIGHT
        self.py_lo = HEIGHT - MARGIN_BOTTOM
        self.py_hi = MARGIN_TOP

    def x(self, v: float) -> float:
        t = (v - self.x_lo) / (self.x_hi - self.x_lo)
        return self.px_lo + t * (self.px_hi - self.px_lo)

    def y(self, v: float) -> float:
        t = (v - self.y_lo) / (self.y_hi - self.y_lo)
        return self.py_lo + t * (self.py_hi - self.py_lo)


def _pad(lo: float, hi: float, frac: float = 0.06) -> tuple[float, float]:
    if lo == hi:
        return lo - 1.0, hi + 1.0
    pad = (hi - lo) * frac
    return lo - pad, hi + pad


def _header(title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
        f'<text x="{WIDTH // 2}" y="24" font-family="sans-serif" font-size="15" '
        f'text-anchor="middle" fill="#111111">{_esc(title)}</text>',
    ]


def _axes(frame: _Frame, x_label: str, y_label: str) -> list[str]:
    parts = []
    x_ticks, xd = _nice_ticks(frame.x_lo, frame.x_hi)
    y_ticks, yd = _nice_ticks(frame.y_lo, frame.y_hi)
    for t in x_ticks:
        px = frame.x(t)
        parts.append(
            f'<line x1="{_fmt(px)}" y1="{frame.py_lo}" x2="{_fmt(px)}" '
            f'y2="{frame.py_hi}" stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(px)}" y="{frame.py_lo + 18}" font-family="sans-serif" '
            f'font-size="11" text-anchor="middle" fill="#333333">{t:.{xd}f}</text>'
        )
    for t in y_ticks:
        py = frame.y(t)
        parts.append(
            f'<line x1="{frame.px_lo}" y1="{_fmt(py)}" x2="{frame.px_hi}" '
            f'y2="{_fmt(py)}" stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{frame.px_lo - 8}" y="{_fmt(py + 4)}" font-family="sans-serif" '
            f'font-size="11" text-anchor="end" fill="#333333">{t:.{yd}f}</text>'
        )
    parts.append(
        f'<rect x="{frame.px_lo}" y="{frame.py_hi}" width="{frame.px_hi - frame.px_lo}" '
        f'height="{frame.py_lo - frame.py_hi}" fill="none" stroke="#444444" stroke-width="1"/>'
    )
    parts.append(
        f'<text x="{(frame.px_lo + frame.px_hi) // 2}" y="{HEIGHT - 14}" '
        f'font-family="sans-serif" font-size="12" text-anchor="middle" '
        f'fill="#111111">{_esc(x_label)}</text>'
    )
    mid_y = (frame.py_lo + frame.py_hi) // 2
    parts.append(
        f'<text x="16" y="{mid_y}" font-family="sans-serif" font-size="12" '
        f'text-anchor="middle" fill="#111111" '
        f'transform="rotate(-90 16 {mid_y})">{_esc(y_label)}</text>'
    )
    return parts


def scatter_svg(
    points: Sequence[tuple[float, float]],
    fit: RegressionFit | None,
    title: str,
    x_label: str,
    y_label: str,
    annotation: str = "",
) -> str:
    """Scatter plot with an optional fitted line and a corner annotation."""
    if not points:
        raise ValueError("scatter_svg needs at least one point")
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    x_lo, x_hi = _pad(min(xs), max(xs))
    y_lo, y_hi = _pad(min(ys), max(ys))
    if fit is not None:
        for x_end in (x_lo, x_hi):
            y_end = fit.slope * x_end + fit.intercept
            y_lo, y_hi = min(y_lo, y_end), max(y_hi, y_end)
    frame = _Frame(x_lo, x_hi, y_lo, y_hi)

    parts = _header(title)
    parts.extend(_axes(frame, x_label, y_label))
    if fit is not None:
        x1, x2 = frame.x_lo, frame.x_hi
        parts.append(
            f'<line x1="{_fmt(frame.x(x1))}" y1="{_fmt(frame.y(fit.slope * x1 + fit.intercept))}" '
            f'x2="{_fmt(frame.x(x2))}" y2="{_fmt(frame.y(fit.slope * x2 + fit.intercept))}" '
            f'stroke="{PALETTE[1]}" stroke-width="2"/>'
        )
    for x, y in points:
        parts.append(
            f'<circle cx="{_fmt(frame.x(x))}" cy="{_fmt(frame.y(y))}" r="3.5" '
            f'fill="{PALETTE[0]}" fill-opacity="0.85"/>'
        )
    if annotation:
        parts.append(
            f'<text x="{frame.px_lo + 10}" y="{frame.py_hi + 18}" font-family="monospace" '
            f'font-size="12" fill="#111111">{_esc(annotation)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def series_svg(
    categories: Sequence[str],
    series: Mapping[str, Sequence[float]],
    title: str,
    y_label: str,
    x_label: str = "section",
) -> str:
    """One polyline per named series across categorical x positions."""
    if not categories:
        raise ValueError("series_svg needs at least one category")
    if not series:
        raise ValueError("series_svg needs at least one series")
    names = sorted(series)
    for name in names:
        if len(series[name]) != len(categories):
            raise ValueError(
                f"series {name!r} has {len(series[name])} values "
                f"for {len(categories)} categories"
            )
    all_values = [v for name in names for v in series[name]]
    y_lo, y_hi = _pad(min(all_values), max(all_values))
    y_lo = min(y_lo, 0.0)
    frame = _Frame(0.0, float(max(1, len(categories) - 1)), y_lo, y_hi)

    parts = _header(title)
    y_ticks, yd = _nice_ticks(frame.y_lo, frame.y_hi)
    for t in y_ticks:
        py = frame.y(t)
        parts.append(
            f'<line x1="{frame.px_lo}" y1="{_fmt(py)}" x2="{frame.px_hi}" '
            f'y2="{_fmt(py)}" stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{frame.px_lo - 8}" y="{_fmt(py + 4)}" font-family="sans-serif" '
            f'font-size="11" text-anchor="end" fill="#333333">{t:.{yd}f}</text>'
        )
    for i, cat in enumerate(categories):
        px = frame.x(float(i))
        parts.append(
            f'<text x="{_fmt(px)}" y="{frame.py_lo + 18}" font-family="sans-serif" '
            f'font-size="11" text-anchor="middle" fill="#333333">{_esc(cat)}</text>'
        )
    parts.append(
        f'<rect x="{frame.px_lo}" y="{frame.py_hi}" width="{frame.px_hi - frame.px_lo}" '
        f'height="{frame.py_lo - frame.py_hi}" fill="none" stroke="#444444" stroke-width="1"/>'
    )
    parts.append(
        f'<text x="{(frame.px_lo + frame.px_hi) // 2}" y="{HEIGHT - 14}" '
        f'font-family="sans-serif" font-size="12" text-anchor="middle" '
        f'fill="#111111">{_esc(x_label)}</text>'
    )
    mid_y = (frame.py_lo + frame.py_hi) // 2
    parts.append(
        f'<text x="16" y="{mid_y}" font-family="sans-serif" font-size="12" '
        f'text-anchor="middle" fill="#111111" '
        f'transform="rotate(-90 16 {mid_y})">{_esc(y_label)}</text>'
    )

    for s_idx, name in enumerate(names):
        color = PALETTE[s_idx % len(PALETTE)]
        pts = " ".join(
            f"{_fmt(frame.x(float(i)))},{_fmt(frame.y(v))}"
            for i, v in enumerate(series[name])
        )
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="2"/>'
        )
        for i, v in enumerate(series[name]):
            parts.append(
                f'<circle cx="{_fmt(frame.x(float(i)))}" cy="{_fmt(frame.y(v))}" '
                f'r="3" fill="{color}"/>'
            )
        lx = frame.px_hi - 110
        ly = frame.py_hi + 16 + 16 * s_idx
        parts.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{lx + 28}" y="{ly}" font-family="sans-serif" font-size="11" '
            f'fill="#111111">{_esc(name)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
