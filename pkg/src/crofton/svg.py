"""Deterministic SVG rendering of polygons, tessellations, and zero-cell paths.

Output is byte-stable: fixed header, 6-decimal coordinates, colors derived
from indices. The window outline is a <path>, cells are <polygon> elements
(so the polygon-element count equals the cell count). The y axis is flipped
at emission so the picture has the mathematical orientation.
"""
from __future__ import annotations

from .geometry import ConvexPolygon
from .tessellation import Tessellation
from .zero_cell import ZeroCellPath

_HEADER = '<?xml version="1.0" encoding="UTF-8"?>\n'


def _pts(polygon: ConvexPolygon) -> str:
    return " ".join(f"{x:.6f},{-y:.6f}" for x, y in polygon.vertices)


def _bbox(polys, margin_frac: float = 0.03):
    xs = [x for p in polys for x, _ in p.vertices]
    ys = [-y for p in polys for _, y in p.vertices]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    m = margin_frac * max(x1 - x0, y1 - y0, 1e-9)
    return x0 - m, y0 - m, (x1 - x0) + 2 * m, (y1 - y0) + 2 * m


def _svg(polys, body: str) -> str:
    x, y, w, h = _bbox(polys)
    return (
        _HEADER
        + f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{x:.6f} {y:.6f} {w:.6f} {h:.6f}">\n'
        + body
        + "</svg>\n"
    )


def _cell_color(i: int) -> str:
    return f"hsl({(i * 47) % 360},65%,72%)"


def render_svg(obj, stroke_width: float | None = None) -> str:
    """Render a ConvexPolygon, Tessellation, or ZeroCellPath as an SVG document."""
    if isinstance(obj, Tessellation):
        sw = stroke_width if stroke_width is not None else 0.004 * max(
            obj.window.perimeter / 4.0, 1e-9
        )
        rows = [
            f'<path d="M {_pts(obj.window).replace(" ", " L ")} Z" fill="none" '
            f'stroke="#000000" stroke-width="{2 * sw:.6f}"/>\n'
        ]
        for i, cell in enumerate(obj.cells):
            rows.append(
                f'<polygon points="{_pts(cell)}" fill="{_cell_color(i)}" '
                f'stroke="#333333" stroke-width="{sw:.6f}"/>\n'
            )
        return _svg([obj.window], "".join(rows))
    if isinstance(obj, ZeroCellPath):
        cells = list(obj.cells)
        sw = stroke_width if stroke_width is not None else 0.004 * max(
            max(c.perimeter for c in cells) / 4.0, 1e-9
        )
        rows = []
        for i, cell in enumerate(cells):
            rows.append(
                f'<polygon points="{_pts(cell)}" fill="none" '
                f'stroke="hsl({(i * 37) % 360},80%,40%)" stroke-width="{sw:.6f}"/>\n'
            )
        return _svg(cells, "".join(rows))
    if isinstance(obj, ConvexPolygon):
        sw = stroke_width if stroke_width is not None else 0.004 * max(obj.perimeter / 4.0, 1e-9)
        body = (
            f'<polygon points="{_pts(obj)}" fill="hsl(205,65%,72%)" '
            f'stroke="#333333" stroke-width="{sw:.6f}"/>\n'
        )
        return _svg([obj], body)
    raise TypeError(f"cannot render {type(obj).__name__}")
