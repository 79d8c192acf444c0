"""Hand-written SVG output for unfolding nets."""

from __future__ import annotations

import numpy as np

from .development import UnfoldingLayout


def _fmt(x) -> str:
    return f"{float(x):.9g}"


def layout_svg(layout: UnfoldingLayout, overlapping=False, width=800) -> str:
    """One polygon per face, the boundary stroked as a separate path, 5% margin."""
    pts = np.vstack(layout.polygons)
    # flip y so that up on the page is up in the development
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    size = np.maximum(hi - lo, 1e-12)
    margin = 0.05 * size.max()
    x0, y0 = lo[0] - margin, -hi[1] - margin
    w, h = size[0] + 2 * margin, size[1] + 2 * margin
    height = width * h / w
    fill = "#f4c7c3" if overlapping else "#d9e8f5"
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" height="{_fmt(height)}" '
           f'viewBox="{_fmt(x0)} {_fmt(y0)} {_fmt(w)} {_fmt(h)}">']
    stroke = _fmt(size.max() / 400)
    for i, poly in enumerate(layout.polygons):
        coords = " ".join(f"{_fmt(x)},{_fmt(-y)}" for x, y in poly)
        out.append(f'  <polygon id="face-{i}" points="{coords}" fill="{fill}" fill-opacity="0.7" '
                   f'stroke="#7a8a99" stroke-width="{stroke}"/>')
    b = layout.boundary.vertices
    d = "M " + " L ".join(f"{_fmt(x)},{_fmt(-y)}" for x, y in b) + " Z"
    out.append(f'  <path id="boundary" d="{d}" fill="none" stroke="#1b2a38" '
               f'stroke-width="{_fmt(size.max() / 200)}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
