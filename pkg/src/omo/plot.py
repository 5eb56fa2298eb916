"""Dependency-free SVG line plots."""
from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    return list(np.linspace(lo, hi, count))


def svg_lines(t, series: dict[str, np.ndarray], title: str = "", log_y: bool = False,
              width: int = 720, height: int = 420) -> str:
    """Render ``series`` against ``t`` as polylines.

    With ``log_y`` the absolute value is plotted on a log10 axis; zeros are dropped.
    """
    t = np.asarray(t, dtype=float)
    left, right, top, bottom = 70, 170, 40, 50
    pw, ph = width - left - right, height - top - bottom

    prepared = {}
    for name, y in series.items():
        y = np.asarray(y, dtype=float)
        if log_y:
            keep = np.abs(y) > 0
            prepared[name] = (t[keep], np.log10(np.abs(y[keep])))
        else:
            keep = np.isfinite(y)
            prepared[name] = (t[keep], y[keep])
    ys = np.concatenate([v for _, v in prepared.values()]) if prepared else np.zeros(1)
    ys = ys if ys.size else np.zeros(1)
    y_lo, y_hi = float(ys.min()), float(ys.max())
    if y_hi - y_lo < 1e-12:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    x_lo, x_hi = float(t.min()) if t.size else 0.0, float(t.max()) if t.size else 1.0
    if x_hi <= x_lo:
        x_hi = x_lo + 1.0

    def sx(v):
        return left + (v - x_lo) / (x_hi - x_lo) * pw

    def sy(v):
        return top + (1 - (v - y_lo) / (y_hi - y_lo)) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<text x="{left}" y="22" font-size="14">{escape(title)}</text>',
           f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>']
    for v in _ticks(y_lo, y_hi):
        label = f"1e{v:.1f}" if log_y else f"{v:.3g}"
        out.append(f'<line x1="{left - 4}" y1="{sy(v):.2f}" x2="{left + pw}" y2="{sy(v):.2f}" '
                   f'stroke="#ddd"/>')
        out.append(f'<text x="{left - 6}" y="{sy(v) + 4:.2f}" text-anchor="end">{label}</text>')
    for v in _ticks(x_lo, x_hi):
        out.append(f'<text x="{sx(v):.2f}" y="{top + ph + 18}" text-anchor="middle">{v:.0f}</text>')
    out.append(f'<text x="{left + pw / 2}" y="{height - 10}" text-anchor="middle">t</text>')
    if not log_y and y_lo < 0 < y_hi:
        out.append(f'<line x1="{left}" y1="{sy(0):.2f}" x2="{left + pw}" y2="{sy(0):.2f}" '
                   f'stroke="#888" stroke-dasharray="4 3"/>')
    for k, (name, (tx, ty)) in enumerate(prepared.items()):
        color = PALETTE[k % len(PALETTE)]
        if tx.size:
            pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(tx, ty))
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = top + 16 + 18 * k
        out.append(f'<line x1="{left + pw + 12}" y1="{ly}" x2="{left + pw + 32}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 38}" y="{ly + 4}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(path, t, series: dict[str, np.ndarray], **kwargs) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(svg_lines(t, series, **kwargs))
