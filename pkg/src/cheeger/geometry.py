"""Exact planar primitives: polygons, distances, convexity, inscribed disks.

All coordinates are 64-bit floats.  Polygons are simple closed chains stored
counterclockwise; clockwise input is reversed on construction, never rejected.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog

from .errors import NonConvexInput

__all__ = [
    "Point2",
    "BBox",
    "JordanPolygon",
    "Segment",
    "Arc",
    "ArcPolygon",
    "polygon_area",
    "polygon_perimeter",
    "signed_distance",
    "is_convex",
    "chebyshev_center",
    "polygon_from_json",
    "polygon_to_json",
    "load_polygon",
]

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Point2:
    """A point in the plane."""

    x: float
    y: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)


@dataclass(frozen=True)
class BBox:
    """Axis-aligned bounding box, min <= max componentwise."""

    min: Point2
    max: Point2

    @property
    def width(self) -> float:
        return self.max.x - self.min.x

    @property
    def height(self) -> float:
        return self.max.y - self.min.y


def _shoelace(vertices: np.ndarray) -> float:
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


class JordanPolygon:
    """Simple closed polygon, counterclockwise, implicitly closed.

    Construction validates: at least 3 vertices, finite coordinates, no
    zero-length edges, and (unless ``trusted=True``) boundary simplicity via
    an all-pairs segment intersection test.  Collinear straight-through
    vertices are permitted; exact fold-backs are not.
    """

    __slots__ = ("vertices",)

    def __init__(self, vertices: Iterable[Sequence[float]], *, trusted: bool = False):
        v = np.asarray(list(vertices) if not isinstance(vertices, np.ndarray) else vertices,
                       dtype=float)
        if v.ndim != 2 or v.shape[1] != 2:
            raise ValueError("vertices must be an (N, 2) array of coordinates")
        if v.shape[0] < 3:
            raise ValueError("a polygon needs at least 3 vertices")
        if not np.all(np.isfinite(v)):
            raise ValueError("vertex coordinates must be finite")
        edges = np.roll(v, -1, axis=0) - v
        if np.any(np.hypot(edges[:, 0], edges[:, 1]) == 0.0):
            raise ValueError("zero-length edge (consecutive duplicate vertex)")
        area2 = _shoelace(v)
        if area2 == 0.0:
            raise ValueError("degenerate polygon with zero signed area")
        if area2 < 0.0:
            v = v[::-1].copy()
            edges = np.roll(v, -1, axis=0) - v
        self._reject_foldbacks(v, edges)
        if not trusted:
            self._validate_simple(v)
        v.setflags(write=False)
        self.vertices = v

    @staticmethod
    def _reject_foldbacks(v: np.ndarray, edges: np.ndarray) -> None:
        nxt = np.roll(edges, -1, axis=0)
        cross = edges[:, 0] * nxt[:, 1] - edges[:, 1] * nxt[:, 0]
        dot = edges[:, 0] * nxt[:, 0] + edges[:, 1] * nxt[:, 1]
        if np.any((cross == 0.0) & (dot < 0.0)):
            raise ValueError("boundary folds back on itself (overlapping edges)")

    @staticmethod
    def _validate_simple(v: np.ndarray) -> None:
        # All-pairs proper/improper segment intersection, adjacent pairs skipped.
        # Chunked so untrusted inputs with thousands of edges stay in memory.
        n = v.shape[0]
        a = v
        b = np.roll(v, -1, axis=0)
        idx = np.arange(n)
        chunk = max(1, 2_000_000 // max(n, 1))
        def cross2(u, v):
            return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]

        for i0 in range(0, n, chunk):
            i1 = min(i0 + chunk, n)
            ia = a[i0:i1, None, :]
            ib = b[i0:i1, None, :]
            d1 = cross2(ib - ia, a[None, :, :] - ia)
            d2 = cross2(ib - ia, b[None, :, :] - ia)
            d3 = cross2(b[None, :, :] - a[None, :, :], ia - a[None, :, :])
            d4 = cross2(b[None, :, :] - a[None, :, :], ib - a[None, :, :])
            proper = (d1 * d2 < 0) & (d3 * d4 < 0)
            # Collinear touch: endpoint of one segment inside the other.
            touch = np.zeros_like(proper)
            for dd, p in ((d1, a[None, :, :]), (d2, b[None, :, :])):
                on_line = dd == 0.0
                if np.any(on_line):
                    inside = (
                        (np.minimum(ia[..., 0], ib[..., 0]) <= p[..., 0])
                        & (p[..., 0] <= np.maximum(ia[..., 0], ib[..., 0]))
                        & (np.minimum(ia[..., 1], ib[..., 1]) <= p[..., 1])
                        & (p[..., 1] <= np.maximum(ia[..., 1], ib[..., 1]))
                    )
                    touch |= on_line & inside
            hits = proper | touch
            # Mask out self and adjacent pairs (shared endpoints are legal).
            gi = idx[i0:i1, None]
            gj = idx[None, :]
            sep = (gj - gi) % n
            hits &= (sep != 0) & (sep != 1) & (sep != n - 1)
            if np.any(hits):
                raise ValueError("polygon boundary is not simple (self-intersection)")

    # -- basic derived data -------------------------------------------------

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Edge start and end points, each (N, 2)."""
        return self.vertices, np.roll(self.vertices, -1, axis=0)

    def bbox(self) -> BBox:
        lo = self.vertices.min(axis=0)
        hi = self.vertices.max(axis=0)
        return BBox(Point2(float(lo[0]), float(lo[1])), Point2(float(hi[0]), float(hi[1])))

    def scaled(self, factor: float, *, trusted: bool = True) -> "JordanPolygon":
        return JordanPolygon(self.vertices * float(factor), trusted=trusted)

    def __len__(self) -> int:
        return self.vertices.shape[0]

    def __repr__(self) -> str:
        return f"JordanPolygon({len(self)} vertices)"


def polygon_area(p: JordanPolygon) -> float:
    """Enclosed area (shoelace); positive for valid polygons."""
    return _shoelace(p.vertices)


def polygon_perimeter(p: JordanPolygon) -> float:
    """Sum of edge lengths."""
    e = np.roll(p.vertices, -1, axis=0) - p.vertices
    return float(np.hypot(e[:, 0], e[:, 1]).sum())


def _point_segment_distances(q: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    e = b - a
    w = q[None, :] - a
    ee = np.einsum("ij,ij->i", e, e)
    t = np.clip(np.einsum("ij,ij->i", w, e) / ee, 0.0, 1.0)
    closest = a + t[:, None] * e
    d = q[None, :] - closest
    return np.hypot(d[:, 0], d[:, 1])


def _crossing_parity(q: np.ndarray, a: np.ndarray, b: np.ndarray) -> bool:
    """Ray-cast parity along +x with the half-open rule on edge y-spans."""
    y = q[1]
    cond = (a[:, 1] <= y) != (b[:, 1] <= y)
    if not np.any(cond):
        return False
    aa, bb = a[cond], b[cond]
    t = (y - aa[:, 1]) / (bb[:, 1] - aa[:, 1])
    xc = aa[:, 0] + t * (bb[:, 0] - aa[:, 0])
    return bool(np.count_nonzero(xc > q[0]) % 2)


def signed_distance(q: Point2 | Sequence[float], p: JordanPolygon) -> float:
    """Distance from ``q`` to the boundary, positive inside and negative outside.

    Exact over all edges (no grid, no propagation); zero on the boundary up to
    floating point.
    """
    qa = q.as_array() if isinstance(q, Point2) else np.asarray(q, dtype=float)
    a, b = p.edge_arrays()
    d = float(_point_segment_distances(qa, a, b).min())
    return d if _crossing_parity(qa, a, b) else -d


def is_convex(p: JordanPolygon) -> bool:
    """True iff every turn is leftward or straight (collinear runs permitted)."""
    v = p.vertices
    e = np.roll(v, -1, axis=0) - v
    nxt = np.roll(e, -1, axis=0)
    cross = e[:, 0] * nxt[:, 1] - e[:, 1] * nxt[:, 0]
    scale = np.hypot(e[:, 0], e[:, 1]) * np.hypot(nxt[:, 0], nxt[:, 1])
    return bool(np.all(cross >= -1e-12 * scale))


def _inward_edge_halfplanes(p: JordanPolygon) -> tuple[np.ndarray, np.ndarray]:
    """Unit inward normals n and offsets c with interior = {x : n.x >= c}."""
    a, b = p.edge_arrays()
    e = b - a
    length = np.hypot(e[:, 0], e[:, 1])
    # CCW interior lies to the left of each edge.
    n = np.stack([-e[:, 1], e[:, 0]], axis=1) / length[:, None]
    c = np.einsum("ij,ij->i", n, a)
    return n, c


def chebyshev_center(p: JordanPolygon) -> tuple[Point2, float]:
    """Center and radius of the largest inscribed disk of a convex polygon.

    Solves the standard LP max r s.t. n_i.x - r >= c_i over the inward edge
    half-planes.  The optimal center can be a segment (e.g. a rectangle); a
    second phase returns the box midpoint of the optimal face so the result
    is deterministic.  Raises NonConvexInput when the precondition fails.
    """
    if not is_convex(p):
        raise NonConvexInput("chebyshev_center requires a convex polygon")
    n, c = _inward_edge_halfplanes(p)
    a_ub = np.column_stack([-n, np.ones(len(c))])
    res = linprog(
        c=[0.0, 0.0, -1.0],
        A_ub=a_ub,
        b_ub=-c,
        bounds=[(None, None), (None, None), (0.0, None)],
        method="highs",
    )
    if not res.success:  # pragma: no cover - cannot happen for valid convex input
        raise NonConvexInput(f"inscribed-disk LP failed: {res.message}")
    radius = float(res.x[2])
    # Phase 2: bounding-box midpoint of {x : n.x >= c + r}, slack for round-off.
    scale = float(np.abs(p.vertices).max())
    b2 = -(c + radius - 1e-10 * max(1.0, scale))
    mid = []
    for axis in (0, 1):
        lohi = []
        for sign in (1.0, -1.0):
            obj = [0.0, 0.0]
            obj[axis] = sign
            r2 = linprog(c=obj, A_ub=-n, b_ub=b2, bounds=[(None, None)] * 2, method="highs")
            if not r2.success:  # pragma: no cover
                raise NonConvexInput(f"inscribed-disk LP failed: {r2.message}")
            lohi.append(float(r2.x[axis]))
        mid.append(0.5 * (lohi[0] + lohi[1]))
    return Point2(mid[0], mid[1]), radius


# -- arc polygons ----------------------------------------------------------


@dataclass(frozen=True)
class Segment:
    """Straight boundary piece from start to end."""

    start: tuple[float, float]
    end: tuple[float, float]

    def length(self) -> float:
        return math.hypot(self.end[0] - self.start[0], self.end[1] - self.start[1])


@dataclass(frozen=True)
class Arc:
    """Circular boundary piece; ccw=True sweeps counterclockwise."""

    center: tuple[float, float]
    radius: float
    start_angle: float
    end_angle: float
    ccw: bool = True

    def point_at(self, angle: float) -> tuple[float, float]:
        return (
            self.center[0] + self.radius * math.cos(angle),
            self.center[1] + self.radius * math.sin(angle),
        )

    @property
    def start(self) -> tuple[float, float]:
        return self.point_at(self.start_angle)

    @property
    def end(self) -> tuple[float, float]:
        return self.point_at(self.end_angle)

    @property
    def sweep(self) -> float:
        """Swept angle in (0, 2*pi]."""
        if self.ccw:
            s = (self.end_angle - self.start_angle) % _TWO_PI
        else:
            s = (self.start_angle - self.end_angle) % _TWO_PI
        return _TWO_PI if s == 0.0 else s

    def length(self) -> float:
        return self.radius * self.sweep


Piece = Segment | Arc


class ArcPolygon:
    """Closed boundary chain mixing segments and circular arcs.

    Consecutive pieces must share endpoints within a 1e-12 relative tolerance;
    arcs need positive radius.  Area and perimeter are exact (Green's theorem
    on segments plus analytic arc terms).
    """

    __slots__ = ("pieces",)

    def __init__(self, pieces: Sequence[Piece]):
        if not pieces:
            raise ValueError("an arc polygon needs at least one piece")
        scale = 1.0
        for pc in pieces:
            if isinstance(pc, Arc):
                if pc.radius <= 0.0:
                    raise ValueError("arc radius must be positive")
                scale = max(scale, abs(pc.center[0]) + pc.radius, abs(pc.center[1]) + pc.radius)
            else:
                scale = max(scale, *(abs(c) for c in pc.start + pc.end))
        tol = 1e-12 * scale
        m = len(pieces)
        for k in range(m):
            cur_end = pieces[k].end
            nxt_start = pieces[(k + 1) % m].start
            gap = math.hypot(cur_end[0] - nxt_start[0], cur_end[1] - nxt_start[1])
            if gap > tol:
                raise ValueError(
                    f"open chain: piece {k} ends {gap:.3e} away from piece {(k + 1) % m}"
                )
        object.__setattr__(self, "pieces", tuple(pieces))

    def __setattr__(self, name, value):  # immutable after construction
        raise AttributeError("ArcPolygon is immutable")

    def perimeter(self) -> float:
        return sum(pc.length() for pc in self.pieces)

    def area(self) -> float:
        """Signed area via (1/2) closed-integral (x dy - y dx), positive ccw."""
        total = 0.0
        for pc in self.pieces:
            if isinstance(pc, Segment):
                x0, y0 = pc.start
                x1, y1 = pc.end
                total += 0.5 * (x0 * y1 - x1 * y0)
            else:
                delta = pc.sweep if pc.ccw else -pc.sweep
                t0 = pc.start_angle
                t1 = t0 + delta
                cx, cy = pc.center
                r = pc.radius
                total += 0.5 * (
                    r * r * delta
                    + r * (cx * (math.sin(t1) - math.sin(t0)) + cy * (math.cos(t0) - math.cos(t1)))
                )
        return total

    def total_arc_sweep(self) -> float:
        """Signed sum of arc sweeps (ccw positive)."""
        return sum((pc.sweep if pc.ccw else -pc.sweep) for pc in self.pieces if isinstance(pc, Arc))

    def __repr__(self) -> str:
        arcs = sum(isinstance(pc, Arc) for pc in self.pieces)
        return f"ArcPolygon({len(self.pieces)} pieces, {arcs} arcs)"


# -- JSON ingestion contract -------------------------------------------------


def polygon_from_json(obj: dict) -> JordanPolygon:
    """Build a polygon from the CLI ingestion format {"vertices": [[x, y], ...]}."""
    try:
        vertices = obj["vertices"]
    except (KeyError, TypeError):
        raise ValueError('polygon JSON must be an object with a "vertices" key')
    return JordanPolygon(vertices)


def polygon_to_json(p: JordanPolygon) -> dict:
    return {"vertices": [[float(x), float(y)] for x, y in p.vertices]}


def load_polygon(path: str | Path) -> JordanPolygon:
    with open(path, "r", encoding="utf-8") as fh:
        return polygon_from_json(json.load(fh))
