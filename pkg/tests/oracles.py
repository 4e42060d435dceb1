"""Independent oracles for the test suite.

Everything here deliberately avoids the library's own computational paths:
brute-force per-edge distances, scalar ray casting, quadrature of the
curvilinear regions, ternary-digit gap enumeration, closed-form quadratics,
and a hand-rolled flood fill.  Expected values asserted in the tests are
computed (or cross-checked) with these.
"""

from __future__ import annotations

import math
from collections import deque
from itertools import product

import numpy as np
from scipy.integrate import quad

SQRT3 = math.sqrt(3.0)


def brute_distance(q, vertices) -> float:
    """Unsigned distance to a closed polygon boundary, plain loop over edges."""
    qx, qy = float(q[0]), float(q[1])
    best = math.inf
    n = len(vertices)
    for i in range(n):
        ax, ay = vertices[i]
        bx, by = vertices[(i + 1) % n]
        ex, ey = bx - ax, by - ay
        t = ((qx - ax) * ex + (qy - ay) * ey) / (ex * ex + ey * ey)
        t = min(max(t, 0.0), 1.0)
        best = min(best, math.hypot(qx - (ax + t * ex), qy - (ay + t * ey)))
    return best


def ray_cast_inside(q, vertices) -> bool:
    """Scalar even-odd rule along +x with the half-open edge convention."""
    qx, qy = float(q[0]), float(q[1])
    inside = False
    n = len(vertices)
    for i in range(n):
        ax, ay = vertices[i]
        bx, by = vertices[(i + 1) % n]
        if (ay <= qy) != (by <= qy):
            t = (qy - ay) / (by - ay)
            if ax + t * (bx - ax) > qx:
                inside = not inside
    return inside


def quad_curvilinear_area(r: float, base: float) -> float:
    """Notch area by 1D quadrature of the strip between the top line and the
    two corner circles."""
    if base == 0.0:
        return 0.0

    def height(u):
        return r - math.sqrt(r * r - min(u, base - u) ** 2)

    val, _ = quad(height, 0.0, base, limit=200, epsabs=1e-14, epsrel=1e-13)
    return val


def quad_straddled_area(x: float, iota: float, beta: float, r: float) -> float:
    """Gap-straddling area by quadrature: the region over the gap below both
    the horizontal cap at height r and the slanted corner cut through the
    retract's deepest point, outside both corner circles."""
    g = iota + beta

    def height(px):
        arc = max(
            math.sqrt(max(r * r - (px - iota) ** 2, 0.0)),
            math.sqrt(max(r * r - (px - g) ** 2, 0.0)),
        )
        return max(0.0, min(r, px / SQRT3) - arc)

    breakpoints = sorted({iota, g, min(g, max(iota, SQRT3 * r)), min(g, max(iota, x))})
    val, _ = quad(height, iota, g, points=breakpoints, limit=400, epsabs=1e-15)
    return val


def gap_starts_by_digits(generation: int) -> list[float]:
    """Generation-j base starts via ternary digits: kept intervals at depth
    k-1 start at sums of digits in {0, 2}; the removed middle third starts one
    more ternary place in."""
    k = generation - 2
    starts = []
    for digits in product((0, 2), repeat=k - 1):
        s = sum(d * 3.0 ** -(i + 1) for i, d in enumerate(digits))
        starts.append(s + 3.0**-k)
    return sorted(starts)


def quadratic_root_low(a: float, b: float, c: float) -> float:
    """Smaller root of a x^2 + b x + c = 0 (b < 0 convention used here)."""
    disc = math.sqrt(b * b - 4.0 * a * c)
    return (-b - disc) / (2.0 * a)


def square_root_r() -> float:
    """Root of (1 - 2r)^2 = pi r^2 in (0, 1/2)."""
    return 1.0 / (2.0 + math.sqrt(math.pi))


def rectangle_root_r() -> float:
    """Root of (2 - 2r)(1 - 2r) = pi r^2, i.e. (4 - pi) r^2 - 6 r + 2 = 0."""
    return quadratic_root_low(4.0 - math.pi, -6.0, 2.0)


def triangle_root_r(side: float = 3.0) -> float:
    """Root of (sqrt3/4)(side - 2 sqrt3 r)^2 = pi r^2 below the inradius."""
    a = 3.0 * SQRT3 - math.pi
    b = -3.0 * side
    c = SQRT3 * side * side / 4.0
    return quadratic_root_low(a, b, c)


def heart_critical_r() -> float:
    """1/h of the cusped two-lobe domain: (3 pi + 4) / (6 pi + 4)."""
    return (3.0 * math.pi + 4.0) / (6.0 * math.pi + 4.0)


def flood_fill_components(mask: np.ndarray) -> int:
    """8-connected component count by BFS, independent of scipy.ndimage."""
    seen = np.zeros_like(mask, dtype=bool)
    ny, nx = mask.shape
    count = 0
    for sy in range(ny):
        for sx in range(nx):
            if not mask[sy, sx] or seen[sy, sx]:
                continue
            count += 1
            queue = deque([(sy, sx)])
            seen[sy, sx] = True
            while queue:
                y, x = queue.popleft()
                for dy in (-1, 0, 1):
                    for dx in (-1, 0, 1):
                        yy, xx = y + dy, x + dx
                        if 0 <= yy < ny and 0 <= xx < nx and mask[yy, xx] and not seen[yy, xx]:
                            seen[yy, xx] = True
                            queue.append((yy, xx))
    return count


def tail_series_sum(n: int, terms: int = 80) -> float:
    """Numeric sum of the radius tail series sum_{j>n} 2^(j-4) / 3^(3j-5)."""
    return sum(2.0 ** (j - 4) / 3.0 ** (3 * j - 5) for j in range(n + 1, n + 1 + terms))


def random_isometry(rng: np.random.Generator):
    """Rotation + translation (+ optional reflection) as a function on (N,2)."""
    theta = rng.uniform(0.0, 2.0 * math.pi)
    c, s = math.cos(theta), math.sin(theta)
    mat = np.array([[c, -s], [s, c]])
    if rng.random() < 0.5:
        mat = mat @ np.array([[1.0, 0.0], [0.0, -1.0]])
    shift = rng.uniform(-5.0, 5.0, size=2)
    return lambda v: v @ mat.T + shift
