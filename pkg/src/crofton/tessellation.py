"""Window tessellations: the cell-splitting jump process and Poisson line arrangements.

The splitting process starts from the trivial tessellation of a convex window;
each cell independently waits an exponential lifetime with rate equal to its
line-hitting mass, then is divided by a line drawn from the measure restricted
to lines hitting that cell. The Poisson line tessellation instead drops a
single Poisson population of lines on the window. Both are exact samplers of
their window marginals; refinement (nesting one tessellation into the cells of
another) and superposition of line populations are provided alongside.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import SimulationAbort
from .geometry import (
    EPS_GEOM,
    ConvexPolygon,
    _area2,
    _clip_cell,
    contains,
    contains_origin_interior,
    split,
)
from .measure import LineMeasure, axis_weights, lambda_of, sample_hitting, sample_poisson_hitting

__all__ = [
    "Tessellation",
    "StitState",
    "PoissonLines",
    "stit_run",
    "stit_run_detailed",
    "pht_sample_lines",
    "tessellation_from_lines",
    "pht_run",
    "superpose",
    "nest",
    "restrict",
    "zero_cell_of",
    "touches_boundary",
]

DEFAULT_MAX_JUMPS = 10_000_000


@dataclass(frozen=True)
class Tessellation:
    """A finite partition of a convex window into convex cells."""

    window: ConvexPolygon
    cells: tuple

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(self.cells))
        self.check_area_partition()

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    def check_area_partition(self, rel_tol: float = 1e-8) -> None:
        """Cheap partition certificate: cell areas must sum to the window area."""
        total = sum(c.area for c in self.cells)
        if abs(total - self.window.area) > rel_tol * self.window.area:
            raise AssertionError(
                f"cells cover {total:.12g} of window area {self.window.area:.12g}"
            )

    def validate(self) -> None:
        """Full partition check: area sum, containment, pairwise disjoint interiors."""
        from .zero_cell import _intersect_tuples

        self.check_area_partition()
        for c in self.cells:
            if not contains(self.window, c):
                raise AssertionError("cell leaks outside the window")
        cells = [c.as_tuples() for c in self.cells]
        for i in range(len(cells)):
            for j in range(i + 1, len(cells)):
                inter = _intersect_tuples(cells[i], cells[j])
                if inter is not None and 0.5 * abs(_area2(inter)) > 1e-10:
                    raise AssertionError(f"cells {i} and {j} overlap")

    def to_json(self):
        return {
            "kind": "tessellation",
            "window": self.window.to_json(),
            "cells": [c.to_json() for c in self.cells],
        }

    @classmethod
    def from_json(cls, data) -> "Tessellation":
        return cls(
            ConvexPolygon.from_json(data["window"]),
            tuple(ConvexPolygon.from_json(c) for c in data["cells"]),
        )


@dataclass(frozen=True)
class StitState:
    """Endpoint of a splitting-process run: tessellation, last jump time, jump count."""

    tessellation: Tessellation
    clock: float
    jumps: int


@dataclass(frozen=True)
class PoissonLines:
    """A sampled line population hitting a window (the generator of a line tessellation)."""

    window: ConvexPolygon
    lines: tuple

    def tessellation(self) -> Tessellation:
        return tessellation_from_lines(self.window, self.lines)


# ---------------------------------------------------------------------------
# the cell-splitting process


def _is_axis_box(window: ConvexPolygon) -> bool:
    if window.n_vertices != 4:
        return False
    v = window.vertices
    for i in range(4):
        dx, dy = v[(i + 1) % 4] - v[i]
        if abs(dx) > EPS_GEOM and abs(dy) > EPS_GEOM:
            return False
    return True


def _stit_rects(wx: float, wy: float, window: ConvexPolygon, t: float, rng, max_jumps: int):
    """Interval-arithmetic splitting run for axis measures on box windows."""
    v = window.vertices
    x0, y0 = float(v[:, 0].min()), float(v[:, 1].min())
    x1, y1 = float(v[:, 0].max()), float(v[:, 1].max())
    cells = [(x0, x1, y0, y1)]
    rates = [wx * (x1 - x0) + wy * (y1 - y0)]
    total = rates[0]
    clock = 0.0
    jumps = 0
    # refillable uniform buffer: 4 draws per jump (gap, cell choice, direction, offset)
    buf = rng.random(512)
    pos = 0
    while True:
        if pos + 4 > buf.size:
            buf = rng.random(max(512, 4 * 64))
            pos = 0
        u_gap, u_cell, u_dir, u_off = buf[pos : pos + 4]
        pos += 4
        gap = -math.log1p(-u_gap) / total
        if clock + gap > t:
            return cells, clock, jumps
        clock += gap
        jumps += 1
        if jumps > max_jumps:
            raise SimulationAbort(f"jump cap {max_jumps} exceeded at time {clock:.6g}")
        target = u_cell * total
        acc = 0.0
        idx = len(cells) - 1
        for i, rt in enumerate(rates):
            acc += rt
            if target < acc:
                idx = i
                break
        cx0, cx1, cy0, cy1 = cells[idx]
        rate = rates[idx]
        if u_dir * rate < wx * (cx1 - cx0):
            cut = cx0 + u_off * (cx1 - cx0)
            a = (cx0, cut, cy0, cy1)
            b = (cut, cx1, cy0, cy1)
        else:
            cut = cy0 + u_off * (cy1 - cy0)
            a = (cx0, cx1, cy0, cut)
            b = (cx0, cx1, cut, cy1)
        cells[idx] = a
        cells.append(b)
        ra = wx * (a[1] - a[0]) + wy * (a[3] - a[2])
        rb = wx * (b[1] - b[0]) + wy * (b[3] - b[2])
        total += ra + rb - rate
        rates[idx] = ra
        rates.append(rb)


def _stit_generic(measure: LineMeasure, window: ConvexPolygon, t: float, rng, max_jumps: int):
    cells = [window]
    rates = [lambda_of(measure, window)]
    total = rates[0]
    clock = 0.0
    jumps = 0
    while True:
        gap = rng.exponential() / total
        if clock + gap > t:
            return cells, clock, jumps
        clock += gap
        jumps += 1
        if jumps > max_jumps:
            raise SimulationAbort(f"jump cap {max_jumps} exceeded at time {clock:.6g}")
        target = rng.random() * total
        acc = 0.0
        idx = len(cells) - 1
        for i, rt in enumerate(rates):
            acc += rt
            if target < acc:
                idx = i
                break
        cell = cells[idx]
        parts = None
        for _ in range(64):  # grazing lines are a measure-zero event
            parts = split(cell, sample_hitting(measure, cell, rng))
            if parts is not None:
                break
        if parts is None:
            raise SimulationAbort("could not split a cell with 64 sampled lines")
        pa, pb = parts
        ra, rb = lambda_of(measure, pa), lambda_of(measure, pb)
        total += ra + rb - rates[idx]
        cells[idx] = pa
        rates[idx] = ra
        cells.append(pb)
        rates.append(rb)


def stit_run_detailed(
    measure: LineMeasure,
    window: ConvexPolygon,
    t: float,
    rng,
    max_jumps: int = DEFAULT_MAX_JUMPS,
) -> StitState:
    """Run the splitting process to time t and keep the clock and jump count."""
    if t <= 0.0:
        raise ValueError(f"t must be positive, got {t}")
    ww = axis_weights(measure.kappa)
    if ww is not None and _is_axis_box(window):
        rects, clock, jumps = _stit_rects(ww[0], ww[1], window, t, rng, max_jumps)
        cells = tuple(
            ConvexPolygon._trusted([(a, c), (b, c), (b, d), (a, d)]) for a, b, c, d in rects
        )
    else:
        polys, clock, jumps = _stit_generic(measure, window, t, rng, max_jumps)
        cells = tuple(polys)
    return StitState(Tessellation(window, cells), clock, jumps)


def stit_run(
    measure: LineMeasure,
    window: ConvexPolygon,
    t: float,
    rng,
    max_jumps: int = DEFAULT_MAX_JUMPS,
) -> Tessellation:
    """Sample the splitting-process tessellation of the window at time t."""
    return stit_run_detailed(measure, window, t, rng, max_jumps).tessellation


# ---------------------------------------------------------------------------
# Poisson line tessellations


def pht_sample_lines(measure: LineMeasure, window: ConvexPolygon, t: float, rng) -> PoissonLines:
    """Poisson(t * Lambda([window])) many i.i.d. window-hitting lines."""
    if t <= 0.0:
        raise ValueError(f"t must be positive, got {t}")
    return PoissonLines(window, tuple(sample_poisson_hitting(measure, window, t, rng)))


def tessellation_from_lines(window: ConvexPolygon, lines) -> Tessellation:
    """Cells of the line arrangement inside a convex window, by iterative splitting."""
    frags = [window]
    for line in lines:
        nxt = []
        for frag in frags:
            parts = split(frag, line)
            if parts is None:
                nxt.append(frag)
            else:
                nxt.extend(parts)
        frags = nxt
    return Tessellation(window, tuple(frags))


def pht_run(measure: LineMeasure, window: ConvexPolygon, t: float, rng) -> Tessellation:
    """Sample the Poisson line tessellation of the window at time t."""
    return pht_sample_lines(measure, window, t, rng).tessellation()


def superpose(a: PoissonLines, b: PoissonLines) -> Tessellation:
    """Tessellation generated by the union of two line populations on one window."""
    if not a.window.close_to(b.window):
        raise ValueError("superpose requires identical windows")
    return tessellation_from_lines(a.window, a.lines + b.lines)


# ---------------------------------------------------------------------------
# nesting and restriction


def _ordered_cells(tess: Tessellation):
    """Cells with the origin-interior cell first, when there is one."""
    idx = None
    for i, c in enumerate(tess.cells):
        if contains_origin_interior(c):
            idx = i
            break
    if idx is None:
        return list(tess.cells)
    return [tess.cells[idx], *tess.cells[:idx], *tess.cells[idx + 1 :]]


def nest(outer: Tessellation, inner_seq) -> Tessellation:
    """Refine each cell of the outer tessellation by one inner tessellation.

    Cell k of the outer tessellation (origin cell enumerated first) is
    intersected with the cells of inner_seq[k]; empty-interior pieces vanish.
    """
    inner_seq = list(inner_seq)
    ordered = _ordered_cells(outer)
    if len(inner_seq) < len(ordered):
        raise ValueError(f"need {len(ordered)} inner tessellations, got {len(inner_seq)}")
    out = []
    for k, cell in enumerate(ordered):
        inner = inner_seq[k]
        if not inner.window.close_to(outer.window):
            raise ValueError("nest requires inner tessellations on the same window")
        if inner.n_cells == 1:
            out.append(cell)
            continue
        constraints = cell.edge_halfplanes()
        for piece in inner.cells:
            verts = piece.as_tuples()
            for aa, bb, cc in constraints:
                verts = _clip_cell(verts, aa, bb, cc)
                if verts is None:
                    break
            if verts is not None:
                out.append(ConvexPolygon._trusted(verts))
    return Tessellation(outer.window, tuple(out))


def restrict(tess: Tessellation, window: ConvexPolygon) -> Tessellation:
    """The tessellation induced on a sub-window (cells clipped, empty pieces dropped)."""
    out = []
    for cell in tess.cells:
        verts = cell.as_tuples()
        for hp_abc in window.edge_halfplanes():
            verts = _clip_cell(verts, *hp_abc)
            if verts is None:
                break
        if verts is not None:
            out.append(ConvexPolygon._trusted(verts))
    return Tessellation(window, tuple(out))


def zero_cell_of(tess: Tessellation) -> ConvexPolygon | None:
    """The cell containing the origin in its interior, or None (origin on a boundary)."""
    for c in tess.cells:
        if contains_origin_interior(c):
            return c
    return None


def touches_boundary(cell: ConvexPolygon, window: ConvexPolygon, tol: float = EPS_GEOM) -> bool:
    """True when some cell vertex lies within tol of the window boundary."""
    for a, b, c in window.edge_halfplanes():
        nrm = math.hypot(a, b)
        for x, y in cell.vertices:
            if abs(a * x + b * y - c) <= tol * nrm:
                return True
    return False
