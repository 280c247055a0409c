"""Minimal self-contained SVG line charts (for quick looks, not for checking)."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

__all__ = ["line_chart"]

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def _ticks(lo, hi, log):
    if log:
        return [10.0**k for k in range(math.floor(lo), math.ceil(hi) + 1) if lo <= k <= hi]
    step = 10 ** math.floor(math.log10((hi - lo) / 4 or 1.0))
    for m in (1, 2, 5, 10):
        if (hi - lo) / (m * step) <= 6:
            step *= m
            break
    first = math.ceil(lo / step) * step
    return [first + i * step for i in range(int((hi - first) / step) + 1)]


def line_chart(
    series: list[tuple[str, np.ndarray, np.ndarray]],
    title: str = "",
    xlabel: str = "t",
    ylabel: str = "",
    loglog: bool = False,
    width: int = 640,
    height: int = 420,
    markers: bool = False,
) -> str:
    """Render ``[(label, x, y), ...]`` as an SVG document string.

    With ``loglog=True`` non-positive points are dropped.
    """
    pad_l, pad_r, pad_t, pad_b = 70, 20, 36, 50
    clean = []
    for label, x, y in series:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        keep = np.isfinite(x) & np.isfinite(y)
        if loglog:
            keep &= (x > 0) & (y > 0)
            x, y = np.log10(x[keep]), np.log10(y[keep])
        else:
            x, y = x[keep], y[keep]
        clean.append((label, x, y))
    xs = np.concatenate([c[1] for c in clean]) if clean else np.array([0.0, 1.0])
    ys = np.concatenate([c[2] for c in clean]) if clean else np.array([0.0, 1.0])
    if xs.size == 0:
        xs, ys = np.array([0.0, 1.0]), np.array([0.0, 1.0])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    pw, ph = width - pad_l - pad_r, height - pad_t - pad_b

    def px(v):
        return pad_l + (v - x0) / (x1 - x0) * pw

    def py(v):
        return pad_t + (1.0 - (v - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{pad_l}" y="{pad_t}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>',
    ]
    for v in _ticks(x0, x1, loglog):
        pos = px(math.log10(v) if loglog else v)
        out.append(f'<line x1="{pos:.1f}" y1="{pad_t + ph}" x2="{pos:.1f}" y2="{pad_t + ph + 5}" stroke="#444"/>')
        out.append(f'<text x="{pos:.1f}" y="{pad_t + ph + 18}" text-anchor="middle">{v:g}</text>')
    for v in _ticks(y0, y1, loglog):
        pos = py(math.log10(v) if loglog else v)
        out.append(f'<line x1="{pad_l - 5}" y1="{pos:.1f}" x2="{pad_l}" y2="{pos:.1f}" stroke="#444"/>')
        out.append(f'<text x="{pad_l - 8}" y="{pos + 4:.1f}" text-anchor="end">{v:g}</text>')
    for i, (label, x, y) in enumerate(clean):
        color = _COLORS[i % len(_COLORS)]
        if len(x):
            pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
            if markers and i == 0:
                out.extend(f'<circle cx="{px(a):.2f}" cy="{py(b):.2f}" r="2.5" fill="{color}"/>' for a, b in zip(x, y))
            else:
                out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        out.append(
            f'<text x="{pad_l + 10}" y="{pad_t + 16 + 15 * i}" fill="{color}">{escape(label)}</text>'
        )
    out.append(f'<text x="{width / 2:.0f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>')
    out.append(f'<text x="{pad_l + pw / 2:.0f}" y="{height - 10}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text transform="translate(16,{pad_t + ph / 2:.0f}) rotate(-90)" text-anchor="middle">{escape(ylabel)}</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"
