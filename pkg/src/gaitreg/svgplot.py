"""Minimal deterministic SVG line plots (mean curve + shaded error band).

Hand-rolled so that two runs with identical inputs yield byte-identical
files; no plotting library injects ids or timestamps.
"""

from __future__ import annotations

import numpy as np

_WIDTH = 640.0
_HEIGHT = 400.0
_LEFT, _RIGHT, _TOP, _BOTTOM = 62.0, 16.0, 34.0, 48.0

_NICE_STEPS = (1.0, 2.0, 2.5, 5.0, 10.0)


def _nice_ceiling(value: float) -> float:
    """Smallest 1/2/2.5/5 x 10^k at or above value."""
    if value <= 0.0:
        return 1.0
    exp = np.floor(np.log10(value))
    base = 10.0**exp
    for step in _NICE_STEPS:
        if step * base >= value * (1.0 - 1e-12):
            return step * base
    return 10.0 * base


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _tick_label(v: float) -> str:
    text = f"{v:.4g}"
    return text


def band_plot_svg(
    x: np.ndarray,
    mean: np.ndarray,
    half_band: np.ndarray,
    title: str,
    x_label: str,
    y_label: str,
    divider_x: float | None = 60.0,
) -> str:
    """Line plot of mean with a +-half_band shaded region and a divider."""
    x = np.asarray(x, dtype=np.float64)
    mean = np.asarray(mean, dtype=np.float64)
    half_band = np.asarray(half_band, dtype=np.float64)
    x_lo, x_hi = float(x.min()), float(x.max())
    y_hi = _nice_ceiling(float(np.max(mean + half_band)) * 1.05)
    y_lo = 0.0

    def px(v):
        return _LEFT + (v - x_lo) / (x_hi - x_lo) * (_WIDTH - _LEFT - _RIGHT)

    def py(v):
        return _HEIGHT - _BOTTOM - (v - y_lo) / (y_hi - y_lo) * (_HEIGHT - _TOP - _BOTTOM)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH:.0f}" '
        f'height="{_HEIGHT:.0f}" viewBox="0 0 {_WIDTH:.0f} {_HEIGHT:.0f}">',
        f'<rect width="{_WIDTH:.0f}" height="{_HEIGHT:.0f}" fill="white"/>',
        f'<text x="{_WIDTH / 2:.0f}" y="20" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{title}</text>',
    ]
    # axes + ticks
    n_yticks = 5
    for i in range(n_yticks + 1):
        v = y_lo + (y_hi - y_lo) * i / n_yticks
        parts.append(
            f'<line x1="{_fmt(_LEFT)}" y1="{_fmt(py(v))}" x2="{_fmt(_WIDTH - _RIGHT)}" '
            f'y2="{_fmt(py(v))}" stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(_LEFT - 6)}" y="{_fmt(py(v) + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{_tick_label(v)}</text>'
        )
    for v in np.linspace(x_lo, x_hi, 6):
        parts.append(
            f'<text x="{_fmt(px(v))}" y="{_fmt(_HEIGHT - _BOTTOM + 16)}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{_tick_label(v)}</text>'
        )
    if divider_x is not None and x_lo < divider_x < x_hi:
        parts.append(
            f'<line x1="{_fmt(px(divider_x))}" y1="{_fmt(py(y_hi))}" '
            f'x2="{_fmt(px(divider_x))}" y2="{_fmt(py(y_lo))}" '
            f'stroke="#888888" stroke-width="1" stroke-dasharray="5,4"/>'
        )
        parts.append(
            f'<text x="{_fmt(px(divider_x) - 6)}" y="{_fmt(_TOP + 12)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11" fill="#666666">stance</text>'
        )
        parts.append(
            f'<text x="{_fmt(px(divider_x) + 6)}" y="{_fmt(_TOP + 12)}" text-anchor="start" '
            f'font-family="sans-serif" font-size="11" fill="#666666">swing</text>'
        )
    # error band
    upper = [f"{_fmt(px(a))},{_fmt(py(b))}" for a, b in zip(x, mean + half_band)]
    lower = [
        f"{_fmt(px(a))},{_fmt(py(max(b, 0.0)))}"
        for a, b in zip(x[::-1], (mean - half_band)[::-1])
    ]
    parts.append(
        '<polygon points="' + " ".join(upper + lower) + '" fill="#aec7e8" fill-opacity="0.55"/>'
    )
    # mean line
    pts = " ".join(f"{_fmt(px(a))},{_fmt(py(b))}" for a, b in zip(x, mean))
    parts.append(f'<polyline points="{pts}" fill="none" stroke="#1f77b4" stroke-width="1.8"/>')
    # frame + labels
    parts.append(
        f'<rect x="{_fmt(_LEFT)}" y="{_fmt(_TOP)}" width="{_fmt(_WIDTH - _LEFT - _RIGHT)}" '
        f'height="{_fmt(_HEIGHT - _TOP - _BOTTOM)}" fill="none" stroke="#333333" stroke-width="1"/>'
    )
    parts.append(
        f'<text x="{_fmt((_LEFT + _WIDTH - _RIGHT) / 2)}" y="{_fmt(_HEIGHT - 10)}" '
        f'text-anchor="middle" font-family="sans-serif" font-size="12">{x_label}</text>'
    )
    parts.append(
        f'<text x="16" y="{_fmt((_TOP + _HEIGHT - _BOTTOM) / 2)}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 16 {_fmt((_TOP + _HEIGHT - _BOTTOM) / 2)})">{y_label}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
