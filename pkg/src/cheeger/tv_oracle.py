"""Independent ratio-cut estimate of the Cheeger constant on a grid graph.

Structurally different from the main solver: the perimeter/area ratio is
minimized directly by Dinkelbach iteration, each step a single s-t min-cut of
the linearized objective cut(F) - lambda |F|.  Cut weights use a
16-neighborhood with angle-fraction coefficients so that cut length
approximates Euclidean perimeter (an axis-only metric would overestimate by
up to sqrt(2) and push the ratio far outside the cross-check band).

This module is a sanity band for the main pipeline, nothing more; the core
package never imports it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import breadth_first_order, maximum_flow

from .errors import DisconnectedDomain, ResolutionTooSmall
from .geometry import JordanPolygon
from .retract import build_field

__all__ = ["GridGraph", "build_grid_graph", "oracle_h"]

# Undirected direction families (dx, dy) with their angular sectors; the
# eight sectors tile the half turn (2 atan(1/2) + 2 atan(1/3) + 4 pi/8 = pi),
# which is what makes straight cuts measure Euclidean length.
_FAMILIES = (
    ((1, 0), math.atan(0.5)),
    ((0, 1), math.atan(0.5)),
    ((1, 1), math.atan(1.0 / 3.0)),
    ((1, -1), math.atan(1.0 / 3.0)),
    ((2, 1), math.pi / 8.0),
    ((1, 2), math.pi / 8.0),
    ((2, -1), math.pi / 8.0),
    ((1, -2), math.pi / 8.0),
)


@dataclass(frozen=True)
class GridGraph:
    """Interior cell mask with Crofton-calibrated cut weights."""

    mask: np.ndarray  # (ny, nx) bool, cell centers inside the domain
    cell: float
    weights: dict[tuple[int, int], float]
    cell_area: float
    boundary_cost: np.ndarray  # per-cell cost of edges leaving the domain


def _family_weight(offset: tuple[int, int], phi: float, cell: float) -> float:
    return cell * phi / (2.0 * math.hypot(*offset))


def build_grid_graph(p: JordanPolygon, resolution: int) -> GridGraph:
    """Rasterize the domain and calibrate the 16-neighborhood cut metric."""
    field = build_field(p, resolution)
    mask = field.values > 0.0
    n_comp = int(ndimage.label(mask, structure=np.ones((3, 3), dtype=int))[1])
    if n_comp != 1:
        raise DisconnectedDomain(f"domain rasterizes to {n_comp} components at {resolution}")
    weights = {off: _family_weight(off, phi, field.cell) for off, phi in _FAMILIES}
    boundary = np.zeros(mask.shape)
    for (dx, dy), w in weights.items():
        for sx, sy in ((dx, dy), (-dx, -dy)):
            neighbor_out = np.ones(mask.shape, dtype=bool)
            src = _shifted_view(mask, sx, sy)
            neighbor_out[src[0]] = ~mask[src[1]]
            boundary += np.where(mask & neighbor_out, w, 0.0)
    return GridGraph(mask, field.cell, weights, field.cell * field.cell, boundary)


def _shifted_view(mask: np.ndarray, dx: int, dy: int):
    """Index pairs (dst, src) so mask2[dst] = mask[src] shifts by (dx, dy)."""
    ny, nx = mask.shape
    ys_dst = slice(max(dy, 0), ny + min(dy, 0))
    xs_dst = slice(max(dx, 0), nx + min(dx, 0))
    ys_src = slice(max(-dy, 0), ny + min(-dy, 0))
    xs_src = slice(max(-dx, 0), nx + min(-dx, 0))
    return (ys_dst, xs_dst), (ys_src, xs_src)


def _interior_links(g: GridGraph, ids: np.ndarray):
    rows, cols, caps = [], [], []
    for (dx, dy), w in g.weights.items():
        (dst, src) = _shifted_view(g.mask, dx, dy)
        pair = g.mask[dst] & g.mask[src]
        rows.append(ids[dst][pair])
        cols.append(ids[src][pair])
        caps.append(np.full(int(pair.sum()), w))
    return np.concatenate(rows), np.concatenate(cols), np.concatenate(caps)


def _cut_value(g: GridGraph, sel: np.ndarray) -> tuple[float, float]:
    """Perimeter-metric value and area of the cell selection ``sel``."""
    perim = float(g.boundary_cost[sel].sum()) if sel.any() else 0.0
    for (dx, dy), w in g.weights.items():
        for sx, sy in ((dx, dy), (-dx, -dy)):
            (dst, src) = _shifted_view(g.mask, sx, sy)
            inside_pair = np.zeros(g.mask.shape, dtype=bool)
            inside_pair[dst] = g.mask[dst] & g.mask[src] & sel[dst] & ~sel[src]
            perim += w * float(inside_pair.sum())
    return perim, float(sel.sum()) * g.cell_area


def oracle_h(p: JordanPolygon, resolution: int,
             trace: list[float] | None = None) -> tuple[float, int]:
    """Ratio-cut approximation of the Cheeger constant.

    Dinkelbach iteration: repeatedly minimize cut(F) - lambda |F| by min-cut
    and set lambda to the minimizer's ratio; lambda decreases strictly and
    the fixed point is returned together with the iteration count.  Pass a
    list as ``trace`` to record the lambda sequence.
    """
    if resolution < 64:
        raise ResolutionTooSmall(f"oracle needs resolution >= 64, got {resolution}")
    g = build_grid_graph(p, resolution)
    n = int(g.mask.sum())
    ids = np.full(g.mask.shape, -1, dtype=np.int64)
    ids[g.mask] = np.arange(n)
    rows, cols, caps = _interior_links(g, ids)
    s, t = n, n + 1
    a = g.cell_area
    bc = g.boundary_cost[g.mask]

    lam = float(bc.sum()) / (n * a)  # ratio of the full domain
    if trace is not None:
        trace.append(lam)
    iterations = 0
    for _ in range(64):
        iterations += 1
        node_term = bc - lam * a  # cost of selecting each cell
        pos = node_term > 0
        neg = ~pos
        r_extra = np.concatenate(
            [np.where(pos)[0], np.full(neg.sum(), s, dtype=np.int64)]
        )
        c_extra = np.concatenate(
            [np.full(pos.sum(), t, dtype=np.int64), np.where(neg)[0]]
        )
        cap_extra = np.concatenate([node_term[pos], -node_term[neg]])
        all_r = np.concatenate([rows, cols, r_extra, c_extra])
        all_c = np.concatenate([cols, rows, c_extra, r_extra])
        all_cap = np.concatenate([caps, caps, cap_extra, cap_extra])
        scale = (2.0**31) / all_cap.max()
        icaps = np.maximum((all_cap * scale).round().astype(np.int64), 1)
        graph = coo_matrix((icaps, (all_r, all_c)), shape=(n + 2, n + 2)).tocsr()
        result = maximum_flow(graph, s, t)
        residual = graph - result.flow
        residual.data = (residual.data > 0).astype(np.int64)
        residual.eliminate_zeros()
        reach = breadth_first_order(residual, s, directed=True, return_predecessors=False)
        sel_nodes = np.zeros(n, dtype=bool)
        sel_nodes[reach[(reach != s) & (reach != t)]] = True
        if not sel_nodes.any():
            break
        sel = np.zeros(g.mask.shape, dtype=bool)
        sel[g.mask] = sel_nodes
        perim, area = _cut_value(g, sel)
        new_lam = perim / area
        if new_lam >= lam - 1e-12:
            break
        lam = new_lam
        if trace is not None:
            trace.append(lam)
    return lam, iterations
