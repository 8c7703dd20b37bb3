"""Tiny deterministic SVG plot writers.

Hand-rolled so that identical inputs produce byte-identical, diffable files;
general-purpose plotting backends do not guarantee that.
"""

from __future__ import annotations

import numpy as np

PALETTE = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
]

_HEADER = '<?xml version="1.0" encoding="UTF-8"?>\n'


def _f(x) -> str:
    return f"{float(x):.2f}"


def _svg(width, height, body) -> str:
    return (
        _HEADER
        + f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        + f'viewBox="0 0 {width} {height}">\n'
        + f'<rect width="{width}" height="{height}" fill="white"/>\n'
        + body
        + "</svg>\n"
    )


def _scale(lo, hi, out_lo, out_hi):
    span = hi - lo if hi > lo else 1.0

    def to(value):
        return out_lo + (value - lo) / span * (out_hi - out_lo)

    return to


def _title(text, width):
    if not text:
        return ""
    return (
        f'<text x="{width // 2}" y="20" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{text}</text>\n'
    )


def scatter_svg(points, labels, removed_edges=(), kept_edges=(),
                width=640, height=640, title="") -> str:
    """Scatter of 2-D points colored by label; removed edges drawn dashed.

    Edges are (i, j) index pairs into ``points``.
    """
    pts = np.asarray(points, dtype=float)
    labels = np.asarray(labels)
    margin = 40.0
    x_to = _scale(pts[:, 0].min(), pts[:, 0].max(), margin, width - margin)
    y_to = _scale(pts[:, 1].min(), pts[:, 1].max(), height - margin, margin)

    parts = [_title(title, width)]
    for i, j in kept_edges:
        parts.append(
            f'<line x1="{_f(x_to(pts[i, 0]))}" y1="{_f(y_to(pts[i, 1]))}" '
            f'x2="{_f(x_to(pts[j, 0]))}" y2="{_f(y_to(pts[j, 1]))}" '
            f'stroke="#cccccc" stroke-width="0.5"/>\n'
        )
    for i, j in removed_edges:
        parts.append(
            f'<line x1="{_f(x_to(pts[i, 0]))}" y1="{_f(y_to(pts[i, 1]))}" '
            f'x2="{_f(x_to(pts[j, 0]))}" y2="{_f(y_to(pts[j, 1]))}" '
            f'stroke="#d62728" stroke-width="1" stroke-dasharray="4,3"/>\n'
        )
    for idx in range(pts.shape[0]):
        color = PALETTE[int(labels[idx]) % len(PALETTE)]
        parts.append(
            f'<circle cx="{_f(x_to(pts[idx, 0]))}" cy="{_f(y_to(pts[idx, 1]))}" '
            f'r="2.5" fill="{color}"/>\n'
        )
    return _svg(width, height, "".join(parts))


def line_plot_svg(series, xlabel="", ylabel="", title="", width=640, height=420) -> str:
    """Line plot of ``[(name, [(x, y), ...]), ...]`` with a simple legend."""
    margin = 55.0
    xs = [x for _, pts in series for x, _ in pts]
    ys = [y for _, pts in series for _, y in pts]
    if not xs:
        return _svg(width, height, _title(title, width))
    x_to = _scale(min(xs), max(xs), margin, width - margin)
    y_to = _scale(min(ys + [0.0]), max(ys + [1.0]), height - margin, margin)

    parts = [_title(title, width)]
    parts.append(
        f'<line x1="{_f(margin)}" y1="{_f(height - margin)}" x2="{_f(width - margin)}" '
        f'y2="{_f(height - margin)}" stroke="black"/>\n'
        f'<line x1="{_f(margin)}" y1="{_f(height - margin)}" x2="{_f(margin)}" '
        f'y2="{_f(margin)}" stroke="black"/>\n'
    )
    for tick in np.linspace(min(xs), max(xs), num=min(6, max(2, len(set(xs))))):
        parts.append(
            f'<text x="{_f(x_to(tick))}" y="{_f(height - margin + 16)}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="10">{tick:.3g}</text>\n'
        )
    for tick in np.linspace(min(ys + [0.0]), max(ys + [1.0]), num=5):
        parts.append(
            f'<text x="{_f(margin - 6)}" y="{_f(y_to(tick) + 3)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="10">{tick:.3g}</text>\n'
        )
    if xlabel:
        parts.append(
            f'<text x="{width // 2}" y="{height - 8}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{xlabel}</text>\n'
        )
    if ylabel:
        parts.append(
            f'<text x="14" y="{height // 2}" text-anchor="middle" font-family="sans-serif" '
            f'font-size="12" transform="rotate(-90 14 {height // 2})">{ylabel}</text>\n'
        )
    for pos, (name, pts) in enumerate(series):
        color = PALETTE[pos % len(PALETTE)]
        coords = " ".join(f"{_f(x_to(x))},{_f(y_to(y))}" for x, y in sorted(pts))
        parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>\n'
        )
        legend_y = margin + 14 * pos
        parts.append(
            f'<rect x="{_f(width - margin - 130)}" y="{_f(legend_y - 8)}" width="10" '
            f'height="10" fill="{color}"/>\n'
            f'<text x="{_f(width - margin - 115)}" y="{_f(legend_y + 1)}" '
            f'font-family="sans-serif" font-size="10">{name}</text>\n'
        )
    return _svg(width, height, "".join(parts))


def _heat_color(value, vmax):
    if not np.isfinite(value):
        return "#eeeeee"
    frac = 0.0 if vmax <= 0 else min(1.0, max(0.0, value / vmax))
    # white -> dark blue ramp
    r = int(round(255 - 200 * frac))
    g = int(round(255 - 170 * frac))
    b = 255
    return f"#{r:02x}{g:02x}{b:02x}"


def heatmap_svg(values, row_labels, col_labels, title="", cell=46) -> str:
    """Heatmap of a small matrix with the numeric value printed in each cell."""
    values = np.asarray(values, dtype=float)
    n_rows, n_cols = values.shape
    left, top = 90, 60
    width = left + cell * n_cols + 30
    height = top + cell * n_rows + 40
    finite = values[np.isfinite(values)]
    vmax = float(finite.max()) if finite.size else 1.0

    parts = [_title(title, width)]
    for c, lab in enumerate(col_labels):
        parts.append(
            f'<text x="{_f(left + cell * (c + 0.5))}" y="{_f(top - 8)}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="10">{lab}</text>\n'
        )
    for r, lab in enumerate(row_labels):
        parts.append(
            f'<text x="{_f(left - 6)}" y="{_f(top + cell * (r + 0.5) + 3)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="10">{lab}</text>\n'
        )
    for r in range(n_rows):
        for c in range(n_cols):
            v = values[r, c]
            parts.append(
                f'<rect x="{_f(left + cell * c)}" y="{_f(top + cell * r)}" width="{cell}" '
                f'height="{cell}" fill="{_heat_color(v, vmax)}" stroke="#999999"/>\n'
            )
            text = "-" if not np.isfinite(v) else f"{v:.2f}"
            parts.append(
                f'<text x="{_f(left + cell * (c + 0.5))}" y="{_f(top + cell * (r + 0.5) + 3)}" '
                f'text-anchor="middle" font-family="sans-serif" font-size="10">{text}</text>\n'
            )
    return _svg(width, height, "".join(parts))
