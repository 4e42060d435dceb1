"""Inner parallel sets on a grid: exact signed-distance fields, areas,
connectivity, and outer Minkowski content.

The field stores the exact signed distance to the polygon boundary at every
cell center (no chamfer propagation: propagated distances carry O(h) errors
that would contaminate the area derivative used for the Minkowski content).
Bulk distances use a k-nearest-vertex search with a provable cutoff: once the
best candidate distance is at most sqrt(rk^2 - L^2/4), where rk is the k-th
vertex distance and L the longest edge, no unexamined edge can do better.
"""

from __future__ import annotations

import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import shapely
from scipy import ndimage
from scipy.spatial import cKDTree
from skimage.measure import find_contours

from .errors import EmptyRetract, NonConvexInput, ResolutionTooSmall
from .geometry import JordanPolygon, Point2, is_convex, polygon_area, polygon_perimeter

__all__ = [
    "DistanceField",
    "RetractEstimate",
    "build_field",
    "retract_area",
    "retract_area_extrapolated",
    "retract_components",
    "inner_retract_convex",
    "minkowski_content",
]

# Max points*candidates per vectorized pass; sized so the working set stays
# cache-friendly (measured ~40% faster than GB-scale batches).
_BATCH_BUDGET = 600_000

# Area error bound constant: |grid area - true area| <= _BOUND_C * cell * len(level set).
# Marching squares is second-order on smooth level sets, so this is generous;
# validated against exact convex retracts in the test suite.
_BOUND_C = 0.5

_EIGHT = np.ones((3, 3), dtype=int)


def segment_set_distances(
    a: np.ndarray, b: np.ndarray, points: np.ndarray, *, workers: int = 1, ring: bool = False
) -> np.ndarray:
    """Exact unsigned distances from ``points`` to the segment set (a[i], b[i]).

    Escalating k-nearest-endpoint search; every returned value equals the true
    minimum over all segments up to floating point.  ``ring=True`` declares
    that b[i] = a[(i+1) % m] (a closed polygon), which halves the search
    structure by indexing unique vertices.
    """
    m = len(a)
    if ring:
        sites = a
        owner = None  # vertex i touches edges i-1 and i
    else:
        sites = np.concatenate([a, b], axis=0)
        owner = np.concatenate([np.arange(m), np.arange(m)])
    lmax = float(np.hypot(*(b - a).T).max())
    tree = cKDTree(sites)
    n_pts = len(points)
    best = np.empty(n_pts)
    unsettled = np.arange(n_pts)
    k = min(4 if ring else 8, len(sites))
    while len(unsettled):
        final = k >= len(sites)
        chunk = max(1, _BATCH_BUDGET // (2 * k if ring else k))
        still = []
        for s0 in range(0, len(unsettled), chunk):
            idx = unsettled[s0 : s0 + chunk]
            p = points[idx]
            dk, ik = tree.query(p, k=k, workers=workers)
            if k == 1:
                dk = dk[:, None]
                ik = ik[:, None]
            seg = np.concatenate([ik, (ik - 1) % m], axis=1) if ring else owner[ik]
            ea = a[seg]
            eb = b[seg]
            w = p[:, None, :] - ea
            e = eb - ea
            ee = np.einsum("ijk,ijk->ij", e, e)
            t = np.clip(np.einsum("ijk,ijk->ij", w, e) / ee, 0.0, 1.0)
            w -= t[..., None] * e
            d = np.sqrt(np.einsum("ijk,ijk->ij", w, w).min(axis=1))
            best[idx] = d
            if not final:
                rk = dk[:, -1]
                cutoff = np.sqrt(np.maximum(rk * rk - 0.25 * lmax * lmax, 0.0))
                still.append(idx[d > cutoff])
        if final:
            break
        unsettled = np.concatenate(still) if still else np.empty(0, dtype=int)
        k = min(k * 4, len(sites))
    return best


@dataclass(frozen=True)
class RetractEstimate:
    """Grid estimate of |{dist >= r}| with an error bound and component count."""

    r: float
    area: float
    area_error_bound: float
    component_count: int
    resolution: int


@dataclass(frozen=True)
class DistanceField:
    """Signed distances to the source boundary sampled at cell centers.

    ``values`` has shape (ny, nx); ``values[iy, ix]`` is the exact signed
    distance at (origin.x + (ix + 0.5) cell, origin.y + (iy + 0.5) cell),
    positive inside.  The grid covers the polygon bounding box with one cell
    of padding on every side.
    """

    origin: Point2
    cell: float
    nx: int
    ny: int
    values: np.ndarray
    source: JordanPolygon | None

    @property
    def resolution(self) -> int:
        return max(self.nx, self.ny) - 2

    def world_of_index(self, ix: np.ndarray, iy: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return (
            self.origin.x + (np.asarray(ix) + 0.5) * self.cell,
            self.origin.y + (np.asarray(iy) + 0.5) * self.cell,
        )

    def dump(self, path: str | Path) -> None:
        """Debug dump: 32-byte header {nx, ny, cell, origin}, then float64 values.

        Little-endian; values in C order (x fastest within each row).
        """
        header = struct.pack("<iiddd", self.nx, self.ny, self.cell, self.origin.x, self.origin.y)
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(np.ascontiguousarray(self.values, dtype="<f8").tobytes())

    @staticmethod
    def load(path: str | Path) -> "DistanceField":
        with open(path, "rb") as fh:
            nx, ny, cell, ox, oy = struct.unpack("<iiddd", fh.read(32))
            values = np.frombuffer(fh.read(), dtype="<f8").reshape(ny, nx).copy()
        values.setflags(write=False)
        return DistanceField(Point2(ox, oy), cell, nx, ny, values, None)


def _grid_layout(p: JordanPolygon, resolution: int) -> tuple[Point2, float, int, int]:
    box = p.bbox()
    cell = max(box.width, box.height) / resolution
    origin = Point2(box.min.x - cell, box.min.y - cell)
    nx = int(np.ceil(box.width / cell)) + 2
    ny = int(np.ceil(box.height / cell)) + 2
    return origin, cell, nx, ny


def _signed_values(p: JordanPolygon, xs: np.ndarray, ys: np.ndarray, workers: int) -> np.ndarray:
    gx, gy = np.meshgrid(xs, ys)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    a, b = p.edge_arrays()
    dist = segment_set_distances(a, b, pts, workers=workers, ring=True)
    poly = shapely.polygons(p.vertices)
    shapely.prepare(poly)
    inside = shapely.contains_xy(poly, pts[:, 0], pts[:, 1])
    return np.where(inside, dist, -dist).reshape(len(ys), len(xs))


def build_field(
    p: JordanPolygon,
    resolution: int,
    *,
    threads: int = 1,
    origin: Point2 | None = None,
    cell: float | None = None,
    nx: int | None = None,
    ny: int | None = None,
) -> DistanceField:
    """Sample exact signed distances on a padded uniform grid.

    ``cell`` is (bounding-box longer side)/resolution and the grid pads the
    box by one cell per side, e.g. the unit square at resolution 64 yields a
    66x66 field.  Passing origin/cell/nx/ny overrides the layout so two
    domains can share one grid (their area estimates then share discretization
    error, which makes small area differences meaningful).
    """
    if resolution < 16:
        raise ResolutionTooSmall(f"resolution {resolution} < 16")
    if origin is None or cell is None or nx is None or ny is None:
        origin, cell, nx, ny = _grid_layout(p, resolution)
    xs = origin.x + (np.arange(nx) + 0.5) * cell
    ys = origin.y + (np.arange(ny) + 0.5) * cell
    if threads > 1:
        bands = np.array_split(np.arange(ny), threads)
        values = np.empty((ny, nx))
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futs = [pool.submit(_signed_values, p, xs, ys[band], 1) for band in bands if len(band)]
            row0 = 0
            for fut in futs:
                block = fut.result()
                values[row0 : row0 + block.shape[0]] = block
                row0 += block.shape[0]
    else:
        values = _signed_values(p, xs, ys, workers=1)
    values.setflags(write=False)
    return DistanceField(origin, cell, nx, ny, values, p)


def _level_loops(f: DistanceField, r: float) -> list[np.ndarray]:
    """Closed marching-squares loops of {dist = r} in world coordinates."""
    loops = find_contours(f.values, level=r, fully_connected="high")
    out = []
    for loop in loops:
        # find_contours yields (row, col) = (y, x) index coordinates.
        world = np.empty_like(loop)
        world[:, 0] = f.origin.x + (loop[:, 1] + 0.5) * f.cell
        world[:, 1] = f.origin.y + (loop[:, 0] + 0.5) * f.cell
        out.append(world)
    return out


def _loops_area_length(loops: list[np.ndarray]) -> tuple[float, float]:
    area = 0.0
    length = 0.0
    for loop in loops:
        x, y = loop[:, 0], loop[:, 1]
        area += abs(0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))
        seg = np.diff(loop, axis=0)
        length += float(np.hypot(seg[:, 0], seg[:, 1]).sum())
    return area, length


def retract_area(f: DistanceField, r: float) -> RetractEstimate:
    """Area of the inner parallel set {dist >= r} from the sampled field.

    Full cells plus the linear (marching-squares) partial-cell correction;
    equivalently the area enclosed by the interpolated level set.  The error
    bound is _BOUND_C * cell * (level-set length).  An empty retract is a
    value (area 0, components 0), not an error.
    """
    if r <= 0:
        raise ValueError("r must be positive")
    mask = f.values >= r
    count = int(ndimage.label(mask, structure=_EIGHT)[1])
    if count == 0:
        return RetractEstimate(r, 0.0, 0.0, 0, f.resolution)
    area, length = _loops_area_length(_level_loops(f, r))
    return RetractEstimate(r, area, _BOUND_C * f.cell * length, count, f.resolution)


def retract_components(f: DistanceField, r: float) -> int:
    """Number of 8-connected components of cells with distance >= r."""
    if r <= 0:
        raise ValueError("r must be positive")
    return int(ndimage.label(f.values >= r, structure=_EIGHT)[1])


def retract_area_extrapolated(
    p: JordanPolygon, r: float, base_resolution: int, *, threads: int = 1
) -> tuple[float, float]:
    """Richardson-extrapolated retract area over resolutions N and 2N.

    Assumes first-order error in cell size: returns (2 A_2N - A_N, |A_2N - A_N|).
    """
    coarse = retract_area(build_field(p, base_resolution, threads=threads), r)
    fine = retract_area(build_field(p, 2 * base_resolution, threads=threads), r)
    return 2.0 * fine.area - coarse.area, abs(fine.area - coarse.area)


def _clip_halfplane(poly: np.ndarray, n: np.ndarray, c: float) -> np.ndarray:
    """Sutherland-Hodgman clip of a convex polygon to {x : n.x >= c}."""
    if len(poly) == 0:
        return poly
    s = poly @ n - c
    out: list[np.ndarray] = []
    m = len(poly)
    for i in range(m):
        j = (i + 1) % m
        if s[i] >= 0.0:
            out.append(poly[i])
            if s[j] < 0.0:
                t = s[i] / (s[i] - s[j])
                out.append(poly[i] + t * (poly[j] - poly[i]))
        elif s[j] >= 0.0:
            t = s[i] / (s[i] - s[j])
            out.append(poly[i] + t * (poly[j] - poly[i]))
    return np.array(out) if out else np.empty((0, 2))


def inner_retract_convex(p: JordanPolygon, r: float) -> JordanPolygon | None:
    """Exact inner parallel set of a convex polygon as a half-plane intersection.

    Returns None when the retract is empty or degenerates to a point/segment
    (r at or beyond the inradius).
    """
    if not is_convex(p):
        raise NonConvexInput("inner_retract_convex requires a convex polygon")
    if r <= 0:
        raise ValueError("r must be positive")
    a, b = p.edge_arrays()
    e = b - a
    length = np.hypot(e[:, 0], e[:, 1])
    normals = np.stack([-e[:, 1], e[:, 0]], axis=1) / length[:, None]
    offsets = np.einsum("ij,ij->i", normals, a) + r
    poly = np.asarray(p.vertices)
    for n, c in zip(normals, offsets):
        poly = _clip_halfplane(poly, n, c)
        if len(poly) < 3:
            return None
    # Collapse numerically-duplicate vertices produced by grazing clips.
    keep = np.hypot(*(poly - np.roll(poly, 1, axis=0)).T) > 1e-14 * max(1.0, length.max())
    poly = poly[keep]
    if len(poly) < 3:
        return None
    x, y = poly[:, 0], poly[:, 1]
    if 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))) <= 0.0:
        return None
    return JordanPolygon(poly, trusted=True)


def minkowski_content(p_or_f: JordanPolygon | DistanceField, r: float) -> float:
    """Outer Minkowski content of the inner parallel set at radius r.

    Convex polygons: perimeter of the exact retract.  Distance fields: the
    finite-difference quotient (area(r - t) - area(r)) / t at t = 2 cell and
    4 cell, extrapolated linearly to t -> 0.  The quotient definition is used
    throughout the grid backend; a perimeter surrogate is never substituted.
    """
    if isinstance(p_or_f, JordanPolygon):
        retract = inner_retract_convex(p_or_f, r)
        if retract is None:
            raise EmptyRetract(f"inner parallel set empty at r={r}")
        return polygon_perimeter(retract)
    f = p_or_f
    base = retract_area(f, r)
    if base.component_count == 0:
        raise EmptyRetract(f"inner parallel set empty at r={r}")
    t2, t4 = 2.0 * f.cell, 4.0 * f.cell
    if r - t4 <= 0:
        raise ValueError("radius too small for the finite-difference stencil")
    d2 = (retract_area(f, r - t2).area - base.area) / t2
    d4 = (retract_area(f, r - t4).area - base.area) / t4
    return 2.0 * d2 - d4


def exact_area_convex(p: JordanPolygon, r: float) -> float:
    """Area of the exact convex retract; 0 when empty."""
    retract = inner_retract_convex(p, r)
    return polygon_area(retract) if retract is not None else 0.0
