"""Certified Cheeger solver: bracket, no-neck verification, and bisection of
the area balance g(r) = |inner parallel set at r| - pi r^2.

Bisection rather than Newton/secant: grid area estimates carry noise at the
extrapolation-difference scale, and bisection only needs signs that clear the
noise band.  When a sign is ambiguous the resolution doubles (up to 4x base);
if the ambiguity persists the solver stops at the noise floor and reports the
bracket midpoint with its residual.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import DegenerateDomain, NeckDetected, NonConvexInput, NoSignChange
from .geometry import (
    JordanPolygon,
    chebyshev_center,
    is_convex,
    polygon_area,
    polygon_perimeter,
    signed_distance,
)
from .retract import (
    DistanceField,
    build_field,
    exact_area_convex,
    inner_retract_convex,
    minkowski_content,
    retract_area,
    retract_components,
)

__all__ = [
    "Bracket",
    "CheegerConfig",
    "NeckCheck",
    "CheegerReport",
    "bracket",
    "neck_check",
    "solve",
    "steiner_ratio_error",
    "steiner_verify",
]

EXACT_TOLERANCE = 1e-12
GRID_TOLERANCE = 1e-4


def _env_threads() -> int:
    try:
        return max(1, int(os.environ.get("CHEEGER_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class Bracket:
    """Root bracket [inradius/2, sqrt(area/pi)/2] for the critical radius."""

    r_lo: float
    r_hi: float


@dataclass(frozen=True)
class CheegerConfig:
    """Solver knobs.  tolerance_r=None resolves per backend (1e-12 exact,
    1e-4 grid); skip_neck_check is the unsafe override and is echoed in the
    report.  backend="grid" forces the grid pipeline on convex input (useful
    for cross-backend validation); "auto" picks exact for convex polygons."""

    tolerance_r: float | None = None
    base_resolution: int = 512
    neck_samples: int = 33
    max_iterations: int = 200
    skip_neck_check: bool = False
    backend: str = "auto"
    threads: int = field(default_factory=_env_threads)

    def resolved_tolerance(self, method: str) -> float:
        if self.tolerance_r is not None:
            return self.tolerance_r
        return EXACT_TOLERANCE if method == "convex-exact" else GRID_TOLERANCE

    def to_dict(self) -> dict:
        return {
            "tolerance_r": self.tolerance_r,
            "base_resolution": self.base_resolution,
            "neck_samples": self.neck_samples,
            "max_iterations": self.max_iterations,
            "skip_neck_check": self.skip_neck_check,
            "backend": self.backend,
            "threads": self.threads,
        }


@dataclass(frozen=True)
class NeckCheck:
    """Connectivity verdict over sampled radii at two grid resolutions."""

    verdict: str  # pass | fail | skipped
    radii: tuple[float, ...]
    component_counts: tuple[tuple[int, ...], ...]
    resolutions: tuple[int, ...]
    failing_radius: float | None = None
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "radii": list(self.radii),
            "component_counts": [list(row) for row in self.component_counts],
            "resolutions": list(self.resolutions),
            "failing_radius": self.failing_radius,
            "note": self.note,
        }


@dataclass(frozen=True)
class CheegerReport:
    """Solver output; h * r = 1 by construction.

    reach(inner parallel set) >= r holds as a theorem under the verified
    no-neck hypothesis and is an assumption of the Steiner bookkeeping here,
    not a computed check.
    """

    h: float
    r: float
    bracket: Bracket
    residual: float
    retract_area: float
    minkowski: float
    neck_check: NeckCheck
    method: str  # convex-exact | grid | koch-analytic
    cheeger_ratio_error: float
    area_lower_bound_ok: bool
    config: CheegerConfig
    resolution_used: int | None = None

    def to_dict(self) -> dict:
        return {
            "h": self.h,
            "r": self.r,
            "bracket": {"r_lo": self.bracket.r_lo, "r_hi": self.bracket.r_hi},
            "residual": self.residual,
            "retract_area": self.retract_area,
            "minkowski_content": self.minkowski,
            "neck_check": self.neck_check.to_dict(),
            "method": self.method,
            "steiner_check": {"cheeger_ratio_error": self.cheeger_ratio_error},
            "area_lower_bound_ok": self.area_lower_bound_ok,
            "config": self.config.to_dict(),
            "resolution_used": self.resolution_used,
            "tool_version": __version__,
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)


def _grid_inradius(f: DistanceField) -> float:
    """Largest sampled distance, refined by a local quadratic fit.

    The refined point is re-evaluated exactly, so the estimate never exceeds
    the true inradius (it is a distance value at an actual point).
    """
    iy, ix = np.unravel_index(int(np.argmax(f.values)), f.values.shape)
    vmax = float(f.values[iy, ix])
    if f.source is None:
        return vmax
    y0, x0 = iy, ix
    if 1 <= y0 < f.ny - 1 and 1 <= x0 < f.nx - 1:
        patch = f.values[y0 - 1 : y0 + 2, x0 - 1 : x0 + 2]
        gx = (patch[1, 2] - patch[1, 0]) / 2.0
        gy = (patch[2, 1] - patch[0, 1]) / 2.0
        hxx = patch[1, 2] - 2.0 * patch[1, 1] + patch[1, 0]
        hyy = patch[2, 1] - 2.0 * patch[1, 1] + patch[0, 1]
        dx = -gx / hxx if hxx < 0 else 0.0
        dy = -gy / hyy if hyy < 0 else 0.0
        dx = float(np.clip(dx, -1.0, 1.0))
        dy = float(np.clip(dy, -1.0, 1.0))
        wx, wy = f.world_of_index(x0 + dx, y0 + dy)
        vmax = max(vmax, signed_distance((float(wx), float(wy)), f.source))
    return vmax


def bracket(p: JordanPolygon, cfg: CheegerConfig | None = None,
            _field: DistanceField | None = None) -> Bracket:
    """Bracket the critical radius: r_lo = inradius/2, r_hi = sqrt(area/pi)/2.

    Convex inradius comes from the inscribed-disk LP; otherwise from the grid
    maximum with local quadratic refinement (always an underestimate, which
    keeps the bracket valid).
    """
    cfg = cfg or CheegerConfig()
    area = polygon_area(p)
    if is_convex(p):
        inradius = chebyshev_center(p)[1]
    else:
        f = _field if _field is not None else build_field(p, cfg.base_resolution,
                                                          threads=cfg.threads)
        inradius = _grid_inradius(f)
    r_lo = inradius / 2.0
    r_hi = 0.5 * math.sqrt(area / math.pi)
    if r_lo >= r_hi:
        raise DegenerateDomain(f"bracket collapsed: r_lo={r_lo} >= r_hi={r_hi}")
    return Bracket(r_lo, r_hi)


def neck_check(p: JordanPolygon, b: Bracket, cfg: CheegerConfig | None = None,
               _fields: tuple[DistanceField, DistanceField] | None = None) -> NeckCheck:
    """Verify the inner parallel set stays connected across the bracket.

    Samples neck_samples radii uniformly in [r_lo, r_hi]; every radius must
    yield exactly one 8-connected component at base resolution and at twice
    the base resolution.  Convex domains pass outright (every retract of a
    convex set is convex, hence connected).
    """
    cfg = cfg or CheegerConfig()
    radii = tuple(np.linspace(b.r_lo, b.r_hi, cfg.neck_samples))
    if is_convex(p) and b.r_hi < chebyshev_center(p)[1]:
        ones = tuple([1] * len(radii))
        return NeckCheck("pass", radii, (ones, ones), (),
                         note="convex domain: retracts are convex, hence connected")
    if _fields is None:
        f1 = build_field(p, cfg.base_resolution, threads=cfg.threads)
        f2 = build_field(p, 2 * cfg.base_resolution, threads=cfg.threads)
    else:
        f1, f2 = _fields
    rows = []
    for f in (f1, f2):
        rows.append(tuple(retract_components(f, r) for r in radii))
    counts = tuple(rows)
    for j, r in enumerate(radii):
        if counts[0][j] != 1 or counts[1][j] != 1:
            return NeckCheck("fail", radii, counts,
                             (cfg.base_resolution, 2 * cfg.base_resolution),
                             failing_radius=float(r))
    return NeckCheck("pass", radii, counts, (cfg.base_resolution, 2 * cfg.base_resolution))


def steiner_ratio_error(retract_area_value: float, minkowski: float, r: float) -> float:
    """Deviation of the dilated set from the Cheeger ratio identity.

    Reconstructs |E| = |retract| + M r + pi r^2 and P(E) = M + 2 pi r and
    returns |P(E) r / |E| - 1|; exactly |residual| / |E| when the inputs obey
    the polynomial expansion.
    """
    area_e = retract_area_value + minkowski * r + math.pi * r * r
    perim_e = minkowski + 2.0 * math.pi * r
    return abs(perim_e * r / area_e - 1.0)


def steiner_verify(report: CheegerReport) -> float:
    """Recompute the Cheeger ratio identity error from a solved report."""
    return steiner_ratio_error(report.retract_area, report.minkowski, report.r)


def _solve_exact(p: JordanPolygon, b: Bracket, cfg: CheegerConfig) -> tuple[float, float]:
    tol = cfg.resolved_tolerance("convex-exact")

    def g(r: float) -> float:
        return exact_area_convex(p, r) - math.pi * r * r

    g_lo, g_hi = g(b.r_lo), g(b.r_hi)
    slack = 1e-12 * max(1.0, polygon_area(p))
    if g_lo < -slack or g_hi > slack:
        raise NoSignChange(f"g({b.r_lo})={g_lo}, g({b.r_hi})={g_hi}")
    lo, hi = b.r_lo, b.r_hi
    for _ in range(cfg.max_iterations):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    return root, g(root)


def _solve_grid(p: JordanPolygon, b: Bracket, cfg: CheegerConfig
                ) -> tuple[float, float, int, DistanceField]:
    tol = cfg.resolved_tolerance("grid")
    resolution = cfg.base_resolution

    def make(res: int) -> tuple[DistanceField, DistanceField]:
        return (build_field(p, res, threads=cfg.threads),
                build_field(p, 2 * res, threads=cfg.threads))

    f1, f2 = make(resolution)

    def g_err(r: float) -> tuple[float, float]:
        a1 = retract_area(f1, r).area
        a2 = retract_area(f2, r).area
        return 2.0 * a2 - a1 - math.pi * r * r, abs(a2 - a1)

    g_lo, e_lo = g_err(b.r_lo)
    g_hi, e_hi = g_err(b.r_hi)
    if g_lo <= e_lo:
        raise NoSignChange(f"g(r_lo)={g_lo} inside noise band {e_lo}; raise the resolution")
    if g_hi >= -e_hi:
        raise NoSignChange(f"g(r_hi)={g_hi} inside noise band {e_hi}; raise the resolution")
    lo, hi = b.r_lo, b.r_hi
    for _ in range(cfg.max_iterations):
        if hi - lo <= tol:
            break
        # Endpoint signal lost: the bracket has shrunk to the noise floor.
        # Double the resolution to regain signs, up to 4x base.
        if g_lo <= e_lo or -g_hi <= e_hi:
            if resolution < 4 * cfg.base_resolution:
                resolution *= 2
                f1, f2 = make(resolution)
                g_lo, e_lo = g_err(lo)
                g_hi, e_hi = g_err(hi)
                continue
            break
        mid = 0.5 * (lo + hi)
        val, err = g_err(mid)
        if abs(val) <= err:
            # The midpoint sits on the root to within evaluation noise; do
            # not iterate past the noise floor.
            lo = hi = mid
            break
        if val > 0.0:
            lo, g_lo, e_lo = mid, val, err
        else:
            hi, g_hi, e_hi = mid, val, err
    root = 0.5 * (lo + hi)
    return root, g_err(root)[0], resolution, f2


def solve(p: JordanPolygon, cfg: CheegerConfig | None = None) -> CheegerReport:
    """Solve the inner Cheeger equation pi r^2 = |retract at r| and certify it.

    The connectivity hypothesis is verified across the whole bracket before
    solving; domains that fail it are rejected with NeckDetected (the check
    is sufficient, not necessary, so rejection is conservative).  The convex
    backend uses exact half-plane retracts; everything else runs on
    Richardson-extrapolated grid areas.
    """
    cfg = cfg or CheegerConfig()
    if cfg.backend not in ("auto", "grid", "exact"):
        raise ValueError(f"unknown backend {cfg.backend!r}")
    convex = is_convex(p) if cfg.backend == "auto" else (cfg.backend == "exact")
    if convex and not is_convex(p):
        raise NonConvexInput("exact backend requires a convex polygon")
    fields: tuple[DistanceField, DistanceField] | None = None
    if convex:
        b = bracket(p, cfg)
    else:
        f1 = build_field(p, cfg.base_resolution, threads=cfg.threads)
        f2 = build_field(p, 2 * cfg.base_resolution, threads=cfg.threads)
        fields = (f1, f2)
        b = bracket(p, cfg, _field=f2)

    if cfg.skip_neck_check:
        neck = NeckCheck("skipped", (), (), (), note="unsafe override: neck check skipped")
    else:
        neck = neck_check(p, b, cfg, _fields=fields)
        if neck.verdict == "fail":
            bad = neck.failing_radius
            idx = neck.radii.index(bad)
            raise NeckDetected(bad, max(row[idx] for row in neck.component_counts))

    if convex:
        root, residual = _solve_exact(p, b, cfg)
        retract = inner_retract_convex(p, root)
        area_r = polygon_area(retract) if retract is not None else 0.0
        mink = polygon_perimeter(retract) if retract is not None else 0.0
        method = "convex-exact"
        resolution_used = None
    else:
        root, residual, resolution_used, fine = _solve_grid(p, b, cfg)
        area_r = retract_area(fine, root).area
        mink = minkowski_content(fine, root)
        method = "grid"

    area_e = area_r + mink * root + math.pi * root * root
    lb_tol = 1e-9 if method == "convex-exact" else 1e-2
    return CheegerReport(
        h=1.0 / root,
        r=root,
        bracket=b,
        residual=residual,
        retract_area=area_r,
        minkowski=mink,
        neck_check=neck,
        method=method,
        cheeger_ratio_error=steiner_ratio_error(area_r, mink, root),
        area_lower_bound_ok=bool(area_e >= 4.0 * math.pi * root * root * (1.0 - lb_tol)),
        config=cfg,
        resolution_used=resolution_used,
    )
