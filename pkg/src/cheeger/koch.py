"""Analytic Cheeger pipeline for the Koch snowflake construction steps.

``koch_polygon(n)`` builds the n-th construction step K_n (K_1 is an
equilateral triangle of side 3).  Steps 1 and 2 have closed-form Cheeger
constants.  Steps 3 and 4 inherit the step-2 solution.  For n >= 5 the
critical radius is found by bisecting a one-dimensional area balance in the
side coordinate x of the retract's deepest point: with d the distance from x
to the depth-(n-2) Cantor set on the unit side, the radius is
r = sqrt(x^2/3 + d^2) and the balance is

    (6 sqrt3 - pi) r^2 - 12 r + 3 sqrt3
        + 12 [ sum_j count_j(x) * notch(r, 3^(2-j)) + straddle(x) ] - pi r^2,

where notch(r, b) is the area of a curvilinear isosceles triangle of base b
bounded by two concave radius-r arcs, count_j counts generation-j triangle
bases on the far part of the side, and straddle handles the base containing
x itself.  A geometric tail series bounds the gap between step n and the
limit snowflake, giving certified digit intervals for the limit constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CapExceeded, CaseMismatch, DomainError
from .geometry import JordanPolygon

__all__ = [
    "CantorData",
    "KochSolution",
    "koch_polygon",
    "k1_closed_form",
    "k2_closed_form",
    "hexagon_case_balance",
    "curvilinear_triangle_area",
    "cantor_gap_data",
    "bases_beyond",
    "straddled_notch_area_low",
    "straddled_notch_area_high",
    "area_balance",
    "analytic_retract_area",
    "analytic_minkowski_content",
    "radius_tail_bound",
    "radius_error_from_area",
    "solve_koch",
]

SQRT3 = math.sqrt(3.0)
MAX_STEP = 12

# Limit constant to the digits the analytic pipeline certifies at n = 8.
LIMIT_H_DIGITS = 1.89124548


def koch_polygon(n: int) -> JordanPolygon:
    """Snowflake construction step n: 3*4^(n-1) edges of length 3^(2-n).

    Generated counterclockwise with bumps pointing outward; the result is
    simple by construction, so boundary validation is skipped.
    """
    if not 1 <= n <= MAX_STEP:
        raise CapExceeded(f"construction step must be in [1, {MAX_STEP}], got {n}")
    side = 3.0
    v = np.array([(0.0, 0.0), (side, 0.0), (side / 2.0, side * SQRT3 / 2.0)])
    cos, sin = 0.5, -SQRT3 / 2.0  # -60 degree rotation: bumps to the right of travel
    for _ in range(n - 1):
        a = v
        b = np.roll(v, -1, axis=0)
        e = (b - a) / 3.0
        p1 = a + e
        p2 = a + 2.0 * e
        apex = p1 + np.column_stack([cos * e[:, 0] - sin * e[:, 1], sin * e[:, 0] + cos * e[:, 1]])
        v = np.stack([a, p1, apex, p2], axis=1).reshape(-1, 2)
    return JordanPolygon(v, trusted=True)


def k1_closed_form() -> float:
    """Cheeger constant of the side-3 equilateral triangle: (6 + 2 sqrt(pi sqrt3)) / (3 sqrt3)."""
    return (6.0 + 2.0 * math.sqrt(math.pi * SQRT3)) / (3.0 * SQRT3)


def hexagon_case_balance(r: float) -> float:
    """Area balance |retract| - pi r^2 of step 2 in the large-radius regime.

    For r >= 1/sqrt3 the retract is a hexagon with six circular arc sides and
    area pi r^2 + 3 sqrt3 / 2 - 3 r cos(a) - 6 a r^2, a = arcsin(1/(2r)).
    The balance is negative throughout that regime, which is why the root
    lives in the star-shaped regime below 1/sqrt3.
    """
    if r < 0.5:
        raise DomainError("hexagon-case balance needs r >= 1/2 so arcsin(1/(2r)) is defined")
    alpha = math.asin(1.0 / (2.0 * r))
    return 1.5 * SQRT3 - 3.0 * r * math.cos(alpha) - 6.0 * alpha * r * r


def k2_closed_form() -> tuple[float, float]:
    """Critical radius and Cheeger constant of construction step 2.

    In the star regime 1/2 <= r < 1/sqrt3 the retract area is
    (6 sqrt3 - pi) r^2 - 12 r + 3 sqrt3; equating to pi r^2 gives
    r2 = (6 - sqrt(6 pi sqrt3 - 18)) / (6 sqrt3 - 2 pi).  The hexagon regime
    is checked to be impossible (negative balance at r = 1/sqrt3).
    """
    if not hexagon_case_balance(1.0 / SQRT3) < 0.0:  # pragma: no cover - analytic fact
        raise AssertionError("large-radius regime unexpectedly feasible")
    r2 = (6.0 - math.sqrt(6.0 * math.pi * SQRT3 - 18.0)) / (6.0 * SQRT3 - 2.0 * math.pi)
    return r2, 1.0 / r2


def curvilinear_triangle_area(r: float, base: float) -> float:
    """Area between a base of length ``base`` and two concave radius-r arcs
    tangent to it:  base*r - (base/2) sqrt(r^2 - base^2/4) - r^2 arcsin(base/(2r)).

    Satisfies 0 <= area <= base^3 / (12 r).
    """
    if base < 0.0 or base > 2.0 * r:
        raise DomainError(f"base must lie in [0, 2r]; got base={base}, r={r}")
    if base == 0.0:
        return 0.0
    half = 0.5 * base
    return base * r - half * math.sqrt(r * r - half * half) - r * r * math.asin(half / r)


@dataclass(frozen=True)
class CantorData:
    """Position of a side coordinate x relative to the depth-n Cantor set.

    d is the distance from x to the set, iota the largest set element <= x,
    beta the length of the gap containing x (0 when x is in the set), and
    r = sqrt(x^2/3 + d^2) the matching retract-corner radius.
    """

    x: float
    n: int
    d: float
    iota: float
    beta: float
    r: float


def cantor_gap_data(x: float, depth: int) -> CantorData:
    """Descend the ternary interval tree ``depth`` levels around x in [0, 1].

    Interval endpoints are tracked as exact integers over powers of three and
    rounded once per comparison, so set elements like 1/3 classify as d = 0 at
    every depth instead of drifting into a gap by accumulated round-off.
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    num, den = 0, 1  # current kept interval [num/den, (num+1)/den]
    d = 0.0
    iota = x
    beta = 0.0
    for _ in range(depth):
        den3 = den * 3
        lo_gap = (3 * num + 1) / den3
        hi_gap = (3 * num + 2) / den3
        if x <= lo_gap:
            num = 3 * num
        elif x >= hi_gap:
            num = 3 * num + 2
        else:
            iota = lo_gap
            beta = 1.0 / den3
            d = min(x - lo_gap, hi_gap - x)
            break
        den = den3
    return CantorData(x, depth, d, iota, beta, math.sqrt(x * x / 3.0 + d * d))


@lru_cache(maxsize=None)
def _base_starts(generation: int) -> tuple[float, ...]:
    """Start coordinates of generation-j triangle bases on the unit side.

    Generation j bases are the middle thirds removed at ternary depth j - 2;
    there are 2^(j-3) of them, each of length 3^(2-j).  Computed in integer
    arithmetic and rounded once, matching cantor_gap_data's endpoints.
    """
    if generation < 3:
        raise ValueError("triangle generations on a side start at 3")
    kept = [0]  # numerators over 3^(k)
    for _ in range(generation - 3):
        kept = [m for num in kept for m in (3 * num, 3 * num + 2)]
    den = 3 ** (generation - 2)
    return tuple(sorted((3 * num + 1) / den for num in kept))


def bases_beyond(x: float, generation: int) -> int:
    """Number of generation-j bases contained in [x, 1] (side coordinates)."""
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    return sum(1 for s in _base_starts(generation) if s >= x)


def _gap_radius(x: float, d: float) -> float:
    return math.sqrt(x * x / 3.0 + d * d)


def straddled_notch_area_low(x: float, depth: int) -> float:
    """Partial notch area when x sits in the lower half of its gap (d = x - iota).

    The retract corner cuts the gap's curvilinear triangle near the gap start;
    this is the area kept on the far side of the cut.
    """
    data = cantor_gap_data(x, depth)
    if data.d == 0.0 or (x - data.iota) > 0.5 * data.beta * (1.0 + 1e-9):
        raise CaseMismatch("x is not in the lower half of an open gap")
    d, beta, r = data.d, data.beta, data.r
    half = 0.5 * beta
    return (
        (x * d + (beta - d) * (2.0 * x - d + beta) - (x - d + beta - r * SQRT3) ** 2)
        / (2.0 * SQRT3)
        - half * math.sqrt(r * r - half * half)
        - 0.5 * r * r * (2.0 * math.asin(half / r) - math.asin(d / r))
    )


def straddled_notch_area_high(x: float, depth: int) -> float:
    """Partial notch area when x sits in the upper half of its gap (d = iota + beta - x)."""
    data = cantor_gap_data(x, depth)
    if data.d == 0.0 or (data.iota + data.beta - x) > 0.5 * data.beta * (1.0 + 1e-9):
        raise CaseMismatch("x is not in the upper half of an open gap")
    d, r = data.d, data.r
    return (x + d) * r - (
        (2.0 * x * x + 3.0 * d * d + x * d) / (2.0 * SQRT3) + 0.5 * r * r * math.asin(d / r)
    )


def _straddle_term(data: CantorData) -> float:
    if data.d == 0.0:
        return 0.0
    if data.x - data.iota <= data.iota + data.beta - data.x:
        return straddled_notch_area_low(data.x, data.n)
    return straddled_notch_area_high(data.x, data.n)


def analytic_retract_area(x: float, n: int) -> float:
    """Retract area of step n at the radius encoded by side coordinate x (n >= 5)."""
    if n < 5:
        raise ValueError("the side-coordinate area formula applies from step 5")
    data = cantor_gap_data(x, n - 2)
    r = data.r
    area = (6.0 * SQRT3 - math.pi) * r * r - 12.0 * r + 3.0 * SQRT3
    extra = sum(
        bases_beyond(x, j) * curvilinear_triangle_area(r, 3.0 ** (2 - j)) for j in range(5, n + 1)
    )
    return area + 12.0 * (extra + _straddle_term(data))


def area_balance(x: float, n: int) -> float:
    """Retract area minus pi r^2 at side coordinate x; strictly decreasing in x."""
    data = cantor_gap_data(x, n - 2)
    return analytic_retract_area(x, n) - math.pi * data.r * data.r


def analytic_minkowski_content(x: float, n: int) -> float:
    """Outer Minkowski content of the step-n retract at a gap-free root (d = 0).

    Minus the r-derivative of the retract area: each notch term contributes
    base - 2 r arcsin(base/(2r)).
    """
    data = cantor_gap_data(x, n - 2)
    if data.d != 0.0:
        raise CaseMismatch("analytic content implemented on the d = 0 branch only")
    r = data.r
    notch = sum(
        bases_beyond(x, j)
        * ((b := 3.0 ** (2 - j)) - 2.0 * r * math.asin(b / (2.0 * r)))
        for j in range(5, n + 1)
    )
    return 12.0 - 2.0 * (6.0 * SQRT3 - math.pi) * r - 12.0 * notch


def radius_tail_bound(n: int) -> float:
    """Upper bound on (limit radius - step-n radius): 2^(n-3) / (25 * 3^(3n-5)).

    Geometric-series tail of the per-generation notch areas pushed through the
    nested-domain radius estimate; consecutive bounds shrink by exactly 2/27.
    """
    if n < 4:
        raise ValueError("the tail bound applies from step 4")
    return 2.0 ** (n - 3) / (25.0 * 3.0 ** (3 * n - 5))


def radius_error_from_area(area_diff: float, r: float) -> float:
    """Radius gap bound for nested domains sharing the area identity: area_diff / (2 pi r)."""
    if area_diff < 0.0 or r <= 0.0:
        raise ValueError("need area_diff >= 0 and r > 0")
    return area_diff / (2.0 * math.pi * r)


@dataclass(frozen=True)
class KochSolution:
    """Solution record for one construction step.

    ``x`` is the side coordinate of the retract's deepest corner (formal
    x = sqrt3 * r for steps 1-4), ``gap_distance`` the Cantor distance at the
    root (expected 0), and ``h_interval`` encloses the limit constant when a
    tail bound is available.
    """

    n: int
    x: float
    r: float
    h: float
    residual: float
    tail_bound: float | None
    h_interval: tuple[float, float] | None
    method: str
    gap_distance: float = 0.0

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "x": self.x,
            "r": self.r,
            "h": self.h,
            "residual": self.residual,
            "tail_bound": self.tail_bound,
            "h_interval": list(self.h_interval) if self.h_interval else None,
            "method": self.method,
            "gap_distance": self.gap_distance,
        }


def _with_interval(n: int, x: float, r: float, residual: float, method: str,
                   gap_distance: float = 0.0) -> KochSolution:
    tail = radius_tail_bound(max(n, 4)) if n >= 2 else None
    interval = (1.0 / (r + tail), 1.0 / r) if tail is not None else None
    return KochSolution(n, x, r, 1.0 / r, residual, tail, interval, method, gap_distance)


@lru_cache(maxsize=None)
def solve_koch(n: int) -> KochSolution:
    """Critical radius and Cheeger constant of construction step n.

    Steps 1-2 use closed forms; steps 3-4 inherit the step-2 solution (their
    extra triangles are out of the Cheeger set's reach); steps >= 5 bisect the
    area balance in x over [x_2, 1] to 1e-12.  The tempting tighter bracket
    [x_{n-1}, 1] is unsound: a previous root can fall inside a gap that only
    opens at the next depth (x_7 sits in the depth-6 gap (667/729, 668/729)),
    where the balance at x_{n-1} is already negative.
    """
    if not 1 <= n <= MAX_STEP:
        raise CapExceeded(f"construction step must be in [1, {MAX_STEP}], got {n}")
    if n == 1:
        h = k1_closed_form()
        r = 1.0 / h
        residual = SQRT3 / 4.0 * (3.0 - 2.0 * SQRT3 * r) ** 2 - math.pi * r * r
        return KochSolution(1, SQRT3 * r, r, h, residual, None, None, "closed-form")
    if n <= 4:
        r2, _ = k2_closed_form()
        residual = (6.0 * SQRT3 - 2.0 * math.pi) * r2 * r2 - 12.0 * r2 + 3.0 * SQRT3
        return _with_interval(n, SQRT3 * r2, r2, residual, "closed-form")

    lo = solve_koch(2).x
    hi = 1.0
    f_lo = area_balance(lo, n)
    f_hi = area_balance(hi, n)
    if not (f_lo > 0.0 > f_hi):  # pragma: no cover - analytic bracket
        raise AssertionError(f"balance bracket failed at step {n}: f({lo})={f_lo}, f(1)={f_hi}")
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if area_balance(mid, n) > 0.0:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    data = cantor_gap_data(x, n - 2)
    return _with_interval(n, x, data.r, area_balance(x, n), "analytic-root", data.d)
