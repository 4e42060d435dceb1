"""Materialize the maximal Cheeger set as the r-dilation of the inner
parallel set, measure it, and render domain/retract/Cheeger-set to SVG.

The dilation form is the computable normal form: the union-of-balls
description coincides with retract (+) ball by definition of the retract, so
the set is never assembled ball by ball.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import EmptyRetract, NonConvexInput
from .geometry import Arc, ArcPolygon, JordanPolygon, Piece, Segment, is_convex
from .retract import DistanceField, _level_loops, _loops_area_length, segment_set_distances

__all__ = ["CheegerSetGeometry", "dilate_convex", "dilate_grid", "render_svg"]

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class CheegerSetGeometry:
    """Measured Cheeger-set geometry from the grid backend.

    ``boundary`` holds closed sub-cell polylines (marching squares) of the
    dilated set; ``retract_boundary`` those of the inner parallel set.
    """

    boundary: list[np.ndarray]
    retract_boundary: list[np.ndarray]
    mask: np.ndarray
    area: float
    perimeter: float
    r: float


def _vertex_arc(center: np.ndarray, r: float, a0: float, a1: float) -> Arc:
    return Arc((float(center[0]), float(center[1])), r, a0, a1, ccw=True)


def dilate_convex(retract: JordanPolygon | Sequence[Sequence[float]], r: float) -> ArcPolygon:
    """Offset a convex retract outward by r: edges shift along their outward
    normals and vertices grow arcs; the arc sweeps total exactly 2 pi.

    Degenerate retracts are handled: a single point dilates to a full circle
    and a two-point segment to a stadium.
    """
    if r <= 0:
        raise ValueError("r must be positive")
    if isinstance(retract, JordanPolygon):
        if not is_convex(retract):
            raise NonConvexInput("dilate_convex requires a convex retract")
        v = np.asarray(retract.vertices)
    else:
        v = np.asarray(retract, dtype=float)
        if v.ndim == 1:
            v = v[None, :]
    if v.shape[0] == 1:
        c = (float(v[0, 0]), float(v[0, 1]))
        return ArcPolygon([Arc(c, r, 0.0, 0.0, ccw=True)])
    if v.shape[0] == 2:
        e = v[1] - v[0]
        length = math.hypot(*e)
        if length == 0.0:
            raise ValueError("degenerate segment retract")
        n = np.array([e[1], -e[0]]) / length  # right-hand normal
        phi = math.atan2(n[1], n[0])
        return ArcPolygon(
            [
                Segment(tuple(v[0] + r * n), tuple(v[1] + r * n)),
                _vertex_arc(v[1], r, phi, phi + math.pi),
                Segment(tuple(v[1] - r * n), tuple(v[0] - r * n)),
                _vertex_arc(v[0], r, phi + math.pi, phi),
            ]
        )

    edges = np.roll(v, -1, axis=0) - v
    lengths = np.hypot(edges[:, 0], edges[:, 1])
    outward = np.stack([edges[:, 1], -edges[:, 0]], axis=1) / lengths[:, None]
    pieces: list[Piece] = []
    m = len(v)
    for i in range(m):
        a = v[i] + r * outward[i]
        b = v[(i + 1) % m] + r * outward[i]
        pieces.append(Segment((float(a[0]), float(a[1])), (float(b[0]), float(b[1]))))
        n_cur = outward[i]
        n_nxt = outward[(i + 1) % m]
        phi0 = math.atan2(n_cur[1], n_cur[0])
        turn = math.atan2(
            n_cur[0] * n_nxt[1] - n_cur[1] * n_nxt[0],
            n_cur[0] * n_nxt[0] + n_cur[1] * n_nxt[1],
        )
        if turn > 1e-15:  # collinear vertices produce no arc
            pieces.append(_vertex_arc(v[(i + 1) % m], r, phi0, phi0 + turn))
    return ArcPolygon(pieces)


def dilate_grid(f: DistanceField, r: float) -> CheegerSetGeometry:
    """Dilate the grid retract by r via a second exact distance field.

    Builds distances from every cell center to the retract's sub-cell
    boundary polyline (negative inside the retract mask); the dilated set is
    the region within r, measured by the same marching-squares machinery.
    """
    if r <= 0:
        raise ValueError("r must be positive")
    mask = f.values >= r
    if not mask.any():
        raise EmptyRetract(f"inner parallel set empty at r={r}")
    retract_loops = _level_loops(f, r)
    seg_a = np.concatenate([loop[:-1] for loop in retract_loops], axis=0)
    seg_b = np.concatenate([loop[1:] for loop in retract_loops], axis=0)
    xs = f.origin.x + (np.arange(f.nx) + 0.5) * f.cell
    ys = f.origin.y + (np.arange(f.ny) + 0.5) * f.cell
    gx, gy = np.meshgrid(xs, ys)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    dist = segment_set_distances(seg_a, seg_b, pts).reshape(f.ny, f.nx)
    signed = np.where(mask, -dist, dist)
    ball_field = DistanceField(f.origin, f.cell, f.nx, f.ny, r - signed, None)
    loops = _level_loops(ball_field, 0.0)
    area, perimeter = _loops_area_length(loops)
    return CheegerSetGeometry(loops, retract_loops, mask, area, perimeter, r)


# -- deterministic SVG rendering --------------------------------------------


def _fmt(x: float) -> str:
    return f"{x:.6f}"


class _SvgMapper:
    def __init__(self, xmin: float, ymin: float, xmax: float, ymax: float, size: float = 720.0):
        span = max(xmax - xmin, ymax - ymin)
        self.scale = (size - 40.0) / span
        self.xmin, self.ymax = xmin, ymax
        self.width = (xmax - xmin) * self.scale + 40.0
        self.height = (ymax - ymin) * self.scale + 40.0

    def pt(self, x: float, y: float) -> tuple[float, float]:
        return 20.0 + (x - self.xmin) * self.scale, 20.0 + (self.ymax - y) * self.scale


def _poly_path(m: _SvgMapper, loops: list[np.ndarray]) -> str:
    cmds = []
    for loop in loops:
        pts = [m.pt(float(x), float(y)) for x, y in loop]
        cmds.append(
            "M " + " L ".join(f"{_fmt(px)} {_fmt(py)}" for px, py in pts) + " Z"
        )
    return " ".join(cmds)


def _arcpolygon_path(m: _SvgMapper, ap: ArcPolygon) -> str:
    start = ap.pieces[0].start
    sx, sy = m.pt(*start)
    cmds = [f"M {_fmt(sx)} {_fmt(sy)}"]
    for pc in ap.pieces:
        if isinstance(pc, Segment):
            ex, ey = m.pt(*pc.end)
            cmds.append(f"L {_fmt(ex)} {_fmt(ey)}")
            continue
        rr = pc.radius * m.scale
        sweep = pc.sweep if pc.ccw else -pc.sweep
        # The y-flip reverses orientation: world-ccw arcs are negative-angle
        # (sweep flag 0) in svg coordinates.
        flag_sweep = 0 if pc.ccw else 1
        gap = math.hypot(pc.end[0] - pc.start[0], pc.end[1] - pc.start[1])
        if gap < 1e-12 * pc.radius:
            # full circle: two half arcs
            mid_angle = pc.start_angle + sweep / 2.0
            mx, my = m.pt(*pc.point_at(mid_angle))
            ex, ey = m.pt(*pc.end)
            cmds.append(f"A {_fmt(rr)} {_fmt(rr)} 0 0 {flag_sweep} {_fmt(mx)} {_fmt(my)}")
            cmds.append(f"A {_fmt(rr)} {_fmt(rr)} 0 0 {flag_sweep} {_fmt(ex)} {_fmt(ey)}")
        else:
            large = 1 if pc.sweep > math.pi else 0
            ex, ey = m.pt(*pc.end)
            cmds.append(f"A {_fmt(rr)} {_fmt(rr)} 0 {large} {flag_sweep} {_fmt(ex)} {_fmt(ey)}")
    cmds.append("Z")
    return " ".join(cmds)


def _as_loops(geom) -> list[np.ndarray]:
    if geom is None:
        return []
    if isinstance(geom, JordanPolygon):
        v = np.asarray(geom.vertices)
        return [np.vstack([v, v[:1]])]
    if isinstance(geom, CheegerSetGeometry):
        return list(geom.boundary)
    if isinstance(geom, np.ndarray):
        return [geom]
    return list(geom)


def render_svg(
    domain: JordanPolygon,
    retract,
    cheeger_set,
    path: str | Path,
    *,
    h: float | None = None,
    r: float | None = None,
) -> None:
    """Write a layered SVG: domain outline, retract fill, Cheeger-set fill,
    and a legend with h and r.  Output is byte-identical for identical inputs
    (coordinates fixed at 6 decimals, no timestamps).

    Layer ids are stable: ``domain``, ``retract``, ``cheeger-set``.
    """
    if r is None and isinstance(cheeger_set, CheegerSetGeometry):
        r = cheeger_set.r
    if h is None and r is not None:
        h = 1.0 / r
    box = domain.bbox()
    m = _SvgMapper(box.min.x, box.min.y, box.max.x, box.max.y)

    if isinstance(cheeger_set, ArcPolygon):
        cheeger_path = _arcpolygon_path(m, cheeger_set)
    else:
        cheeger_path = _poly_path(m, _as_loops(cheeger_set))
    retract_path = _poly_path(m, _as_loops(retract))
    domain_path = _poly_path(m, _as_loops(domain))

    legend = ""
    if h is not None and r is not None:
        legend = (
            f'<text x="24" y="{_fmt(m.height - 10.0)}" font-family="monospace" '
            f'font-size="14">h = {h:.9f}   r = {r:.9f}</text>\n'
        )
    svg = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(m.width)}" '
        f'height="{_fmt(m.height + 24.0)}" version="1.1">\n'
        f'<g id="cheeger-set"><path d="{cheeger_path}" fill="#9ecae1" '
        f'fill-rule="evenodd" stroke="none"/></g>\n'
        f'<g id="retract"><path d="{retract_path}" fill="#3182bd" '
        f'fill-rule="evenodd" stroke="none"/></g>\n'
        f'<g id="domain"><path d="{domain_path}" fill="none" stroke="#000000" '
        f'stroke-width="1.2"/></g>\n'
        f"{legend}"
        f"</svg>\n"
    )
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(svg)
    except OSError as exc:
        raise OSError(f"cannot write SVG to '{path}': {exc}") from exc
