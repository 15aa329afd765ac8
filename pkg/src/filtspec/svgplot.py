"""Minimal deterministic SVG figures: band-shaded line plots and bar charts.

Textual output only: byte-identical for identical inputs, diffable, and
renderable without any plotting dependency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .analysis import BandDefinition

WIDTH = 680
HEIGHT = 400
MARGIN_LEFT = 64
MARGIN_RIGHT = 16
MARGIN_TOP = 40
MARGIN_BOTTOM = 56

BAND_FILLS = {
    "delta": "#e8eefb",
    "theta": "#e7f3ea",
    "alpha": "#fdf3dc",
    "beta": "#fbe9e7",
    "gamma": "#f1e8fa",
}
BAND_GLYPHS = {"delta": "δ", "theta": "θ", "alpha": "α", "beta": "β", "gamma": "γ"}

MODALITY_COLORS = {
    "EEG": "#4472c4",
    "EOG": "#d9534f",
    "EMG": "#5cb85c",
    "other": "#999999",
}


@dataclass(frozen=True)
class Curve:
    x: list
    y: list
    color: str = "#1f3864"
    dashed: bool = False
    label: str = ""


def _nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / target
    step = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= step * mult:
            step *= mult
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * span:
        ticks.append(round(t, 10))
        t += step
    return ticks


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _finite(values) -> list[float]:
    return [float(v) for v in values if math.isfinite(float(v))]


class _Frame:
    """Maps data coordinates onto the SVG plot area."""

    def __init__(self, x_range, y_range):
        self.x_lo, self.x_hi = x_range
        self.y_lo, self.y_hi = y_range
        if self.x_hi <= self.x_lo:
            self.x_hi = self.x_lo + 1.0
        if self.y_hi <= self.y_lo:
            self.y_hi = self.y_lo + 1.0

    def x(self, v: float) -> float:
        frac = (v - self.x_lo) / (self.x_hi - self.x_lo)
        return MARGIN_LEFT + frac * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)

    def y(self, v: float) -> float:
        frac = (v - self.y_lo) / (self.y_hi - self.y_lo)
        return HEIGHT - MARGIN_BOTTOM - frac * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)


def _axes(parts: list[str], frame: _Frame, title: str, xlabel: str, ylabel: str) -> None:
    x0, x1 = MARGIN_LEFT, WIDTH - MARGIN_RIGHT
    y0, y1 = HEIGHT - MARGIN_BOTTOM, MARGIN_TOP
    parts.append(
        f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" '
        'fill="none" stroke="#444444" stroke-width="1"/>'
    )
    for t in _nice_ticks(frame.x_lo, frame.x_hi):
        px = frame.x(t)
        parts.append(
            f'<line x1="{_fmt(px)}" y1="{y0}" x2="{_fmt(px)}" y2="{y0 + 4}" stroke="#444444"/>'
        )
        parts.append(
            f'<text x="{_fmt(px)}" y="{y0 + 18}" font-size="11" text-anchor="middle" '
            f'fill="#333333">{t:g}</text>'
        )
    for t in _nice_ticks(frame.y_lo, frame.y_hi):
        py = frame.y(t)
        parts.append(
            f'<line x1="{x0 - 4}" y1="{_fmt(py)}" x2="{x0}" y2="{_fmt(py)}" stroke="#444444"/>'
        )
        parts.append(
            f'<text x="{x0 - 8}" y="{_fmt(py + 4)}" font-size="11" text-anchor="end" '
            f'fill="#333333">{t:g}</text>'
        )
    parts.append(
        f'<text x="{(x0 + x1) / 2:.2f}" y="{HEIGHT - 14}" font-size="13" text-anchor="middle" '
        f'fill="#111111">{xlabel}</text>'
    )
    parts.append(
        f'<text x="18" y="{(y0 + y1) / 2:.2f}" font-size="13" text-anchor="middle" '
        f'fill="#111111" transform="rotate(-90 18 {(y0 + y1) / 2:.2f})">{ylabel}</text>'
    )
    parts.append(
        f'<text x="{(x0 + x1) / 2:.2f}" y="24" font-size="15" text-anchor="middle" '
        f'fill="#111111">{title}</text>'
    )


def _band_rects(parts: list[str], frame: _Frame, bands) -> None:
    y0, y1 = HEIGHT - MARGIN_BOTTOM, MARGIN_TOP
    for band in bands:
        lo = max(band.low_hz, frame.x_lo)
        hi = min(band.high_hz, frame.x_hi)
        if hi <= lo:
            continue
        px0, px1 = frame.x(lo), frame.x(hi)
        fill = BAND_FILLS.get(band.name, "#f0f0f0")
        parts.append(
            f'<rect x="{_fmt(px0)}" y="{y1}" width="{_fmt(px1 - px0)}" '
            f'height="{y0 - y1}" fill="{fill}"/>'
        )
        glyph = BAND_GLYPHS.get(band.name, band.name)
        parts.append(
            f'<text x="{_fmt((px0 + px1) / 2)}" y="{y1 + 14}" font-size="12" '
            f'text-anchor="middle" fill="#666666">{glyph}</text>'
        )


def line_plot(
    title: str,
    xlabel: str,
    ylabel: str,
    curves: list[Curve],
    bands: tuple[BandDefinition, ...] = (),
) -> str:
    """Line plot; non-finite y values split the polyline."""
    xs = [float(v) for curve in curves for v in curve.x]
    ys = [v for curve in curves for v in _finite(curve.y)]
    frame = _Frame(
        (min(xs), max(xs)),
        (min(0.0, min(ys)) if ys else 0.0, max(ys) * 1.05 if ys else 1.0),
    )
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
    ]
    _band_rects(parts, frame, bands)
    _axes(parts, frame, title, xlabel, ylabel)
    for curve in curves:
        dash = ' stroke-dasharray="6 4"' if curve.dashed else ""
        segment: list[str] = []
        for x, y in zip(curve.x, curve.y):
            if math.isfinite(float(y)):
                segment.append(f"{_fmt(frame.x(float(x)))},{_fmt(frame.y(float(y)))}")
            elif segment:
                parts.append(
                    f'<polyline points="{" ".join(segment)}" fill="none" '
                    f'stroke="{curve.color}" stroke-width="1.5"{dash}/>'
                )
                segment = []
        if segment:
            parts.append(
                f'<polyline points="{" ".join(segment)}" fill="none" '
                f'stroke="{curve.color}" stroke-width="1.5"{dash}/>'
            )
    legend_y = MARGIN_TOP + 16
    for curve in curves:
        if not curve.label:
            continue
        x0 = WIDTH - MARGIN_RIGHT - 150
        dash = ' stroke-dasharray="6 4"' if curve.dashed else ""
        parts.append(
            f'<line x1="{x0}" y1="{legend_y - 4}" x2="{x0 + 26}" y2="{legend_y - 4}" '
            f'stroke="{curve.color}" stroke-width="1.5"{dash}/>'
        )
        parts.append(
            f'<text x="{x0 + 32}" y="{legend_y}" font-size="11" fill="#333333">'
            f"{curve.label}</text>"
        )
        legend_y += 16
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def bar_chart(title: str, ylabel: str, bars: list[tuple[str, float, str]]) -> str:
    """Vertical bar chart of (label, value, color) triples."""
    values = [v for _, v, _ in bars]
    lo = min(0.0, min(values)) if values else 0.0
    hi = max(0.0, max(values)) if values else 1.0
    frame = _Frame((0.0, float(max(1, len(bars)))), (lo, hi * 1.1 if hi > 0 else hi))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
    ]
    _axes(parts, frame, title, "", ylabel)
    zero_y = frame.y(0.0)
    slot = (WIDTH - MARGIN_LEFT - MARGIN_RIGHT) / max(1, len(bars))
    for i, (label, value, color) in enumerate(bars):
        x = MARGIN_LEFT + i * slot + slot * 0.15
        top = frame.y(max(0.0, value))
        bottom = frame.y(min(0.0, value))
        parts.append(
            f'<rect x="{_fmt(x)}" y="{_fmt(top)}" width="{_fmt(slot * 0.7)}" '
            f'height="{_fmt(max(bottom - top, 0.0))}" fill="{color}"/>'
        )
        parts.append(
            f'<text x="{_fmt(x + slot * 0.35)}" y="{HEIGHT - MARGIN_BOTTOM + 18}" '
            f'font-size="10" text-anchor="middle" fill="#333333">{label}</text>'
        )
    parts.append(
        f'<line x1="{MARGIN_LEFT}" y1="{_fmt(zero_y)}" x2="{WIDTH - MARGIN_RIGHT}" '
        f'y2="{_fmt(zero_y)}" stroke="#444444" stroke-width="1"/>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
