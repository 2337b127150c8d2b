"""Minimal self-contained SVG writers for line plots and heatmaps."""
from xml.sax.saxutils import escape

import numpy as np

W, H = 640, 420
PAD_L, PAD_R, PAD_T, PAD_B = 70, 20, 30, 50


def _fmt(v):
    return f"{v:.6g}"


def _frame(xlim, ylim, xlabel, ylabel, title):
    x0, x1 = xlim
    y0, y1 = ylim
    pw, ph = W - PAD_L - PAD_R, H - PAD_T - PAD_B

    def sx(x):
        return PAD_L + (np.asarray(x) - x0) / (x1 - x0) * pw

    def sy(y):
        return PAD_T + ph - (np.asarray(y) - y0) / (y1 - y0) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W / 2}" y="18" text-anchor="middle">{escape(title)}</text>',
        f'<rect x="{PAD_L}" y="{PAD_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in np.linspace(x0, x1, 5):
        X = sx(t)
        parts.append(f'<line x1="{X:.2f}" y1="{PAD_T + ph}" x2="{X:.2f}" y2="{PAD_T + ph + 5}" stroke="black"/>')
        parts.append(f'<text x="{X:.2f}" y="{PAD_T + ph + 18}" text-anchor="middle">{_fmt(t)}</text>')
    for t in np.linspace(y0, y1, 5):
        Y = sy(t)
        parts.append(f'<line x1="{PAD_L - 5}" y1="{Y:.2f}" x2="{PAD_L}" y2="{Y:.2f}" stroke="black"/>')
        parts.append(f'<text x="{PAD_L - 8}" y="{Y + 4:.2f}" text-anchor="end">{_fmt(t)}</text>')
    parts.append(f'<text x="{PAD_L + pw / 2}" y="{H - 10}" text-anchor="middle">{escape(xlabel)}</text>')
    parts.append(f'<text x="16" y="{PAD_T + ph / 2}" text-anchor="middle" '
                 f'transform="rotate(-90 16 {PAD_T + ph / 2})">{escape(ylabel)}</text>')
    return parts, sx, sy


def line_plot(xs, ys, xlabel="x", ylabel="y", title=""):
    """SVG document with one polyline; non-finite points are skipped."""
    xs, ys = np.asarray(xs, float), np.asarray(ys, float)
    ok = np.isfinite(xs) & np.isfinite(ys)
    xlim = (float(xs.min()), float(xs.max())) if xs.size else (0.0, 1.0)
    if xlim[0] == xlim[1]:
        xlim = (xlim[0] - 0.5, xlim[1] + 0.5)
    top = float(ys[ok].max()) if ok.any() else 1.0
    ylim = (0.0, top * 1.05 if top > 0 else 1.0)
    parts, sx, sy = _frame(xlim, ylim, xlabel, ylabel, title)
    pts = " ".join(f"{X:.2f},{Y:.2f}" for X, Y in zip(sx(xs[ok]), sy(ys[ok])))
    parts.append(f'<polyline points="{pts}" fill="none" stroke="#1f4e9c" stroke-width="1.5"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def heatmap(xs, ys, Z, curves=(), xlabel="x", ylabel="y", title=""):
    """Diverging heatmap of ``Z`` (rows follow ``ys``) with optional overlay curves.

    Positive values are red, negative blue, scaled by the largest magnitude.
    Each curve is an ``(m, 2)`` array drawn as separate polyline segments.
    """
    xs, ys, Z = np.asarray(xs, float), np.asarray(ys, float), np.asarray(Z, float)
    xlim, ylim = (xs[0], xs[-1]), (ys[0], ys[-1])
    parts, sx, sy = _frame(xlim, ylim, xlabel, ylabel, title)
    dx = abs(sx(xs[1]) - sx(xs[0])) if xs.size > 1 else W
    dy = abs(sy(ys[1]) - sy(ys[0])) if ys.size > 1 else H
    vmax = np.nanmax(np.abs(Z)) or 1.0
    for i, y in enumerate(ys):
        for j, x in enumerate(xs):
            v = Z[i, j] / vmax
            s = int(255 * (1 - min(1.0, abs(v)) ** 0.5))
            color = f"rgb(255,{s},{s})" if v > 0 else f"rgb({s},{s},255)"
            parts.append(f'<rect x="{sx(x) - dx / 2:.2f}" y="{sy(y) - dy / 2:.2f}" '
                         f'width="{dx + 0.3:.2f}" height="{dy + 0.3:.2f}" fill="{color}"/>')
    for curve in curves:
        c = np.asarray(curve, float)
        inside = ((c[:, 0] >= xlim[0]) & (c[:, 0] <= xlim[1])
                  & (c[:, 1] >= ylim[0]) & (c[:, 1] <= ylim[1]))
        c = c[inside]
        if len(c) > 1:
            pts = " ".join(f"{X:.2f},{Y:.2f}" for X, Y in zip(sx(c[:, 0]), sy(c[:, 1])))
            parts.append(f'<polyline points="{pts}" fill="none" stroke="black" stroke-width="1.5"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
