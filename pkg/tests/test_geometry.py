from __future__ import annotations

import json
import math

import numpy as np
import pytest

from cheeger.errors import NonConvexInput
from cheeger.geometry import (
    Arc,
    ArcPolygon,
    JordanPolygon,
    Segment,
    chebyshev_center,
    is_convex,
    polygon_area,
    polygon_from_json,
    polygon_perimeter,
    polygon_to_json,
    signed_distance,
)
from oracles import brute_distance, random_isometry, ray_cast_inside

SQRT3 = math.sqrt(3.0)


def test_area_unit_square(square):
    assert polygon_area(square) == pytest.approx(1.0, abs=0.0)


def test_area_k1_k2(k1, k2):
    assert polygon_area(k1) == pytest.approx(9.0 * SQRT3 / 4.0, rel=1e-14)
    # triangle plus three unit bumps
    assert polygon_area(k2) == pytest.approx(9.0 * SQRT3 / 4.0 + 3.0 * SQRT3 / 4.0, rel=1e-14)
    assert polygon_area(k2) == pytest.approx(3.0 * SQRT3, rel=1e-14)


def test_perimeter_values(square, k1, k5):
    assert polygon_perimeter(square) == pytest.approx(4.0)
    assert polygon_perimeter(k1) == pytest.approx(9.0)
    assert polygon_perimeter(k5) == pytest.approx(9.0 * (4.0 / 3.0) ** 4, rel=1e-13)


def test_rigid_motion_invariance_and_scaling(k2):
    rng = np.random.default_rng(7)
    a0, p0 = polygon_area(k2), polygon_perimeter(k2)
    for _ in range(12):
        move = random_isometry(rng)
        moved = JordanPolygon(move(np.asarray(k2.vertices)), trusted=True)
        assert polygon_area(moved) == pytest.approx(a0, rel=1e-12)
        assert polygon_perimeter(moved) == pytest.approx(p0, rel=1e-12)
    lam = 3.7
    scaled = k2.scaled(lam)
    assert polygon_area(scaled) == pytest.approx(lam * lam * a0, rel=1e-12)
    assert polygon_perimeter(scaled) == pytest.approx(lam * p0, rel=1e-12)


def test_signed_distance_examples(square, k1):
    assert signed_distance((0.5, 0.5), square) == pytest.approx(0.5)
    assert signed_distance((2.0, 0.5), square) == pytest.approx(-1.0)
    incenter = (1.5, SQRT3 / 2.0)
    assert signed_distance(incenter, k1) == pytest.approx(SQRT3 / 2.0, rel=1e-13)


def test_signed_distance_sign_matches_ray_cast(k2, heart):
    rng = np.random.default_rng(3)
    for poly in (k2, heart):
        lo = poly.vertices.min(axis=0) - 0.5
        hi = poly.vertices.max(axis=0) + 0.5
        pts = rng.uniform(lo, hi, size=(1000, 2))
        for q in pts:
            sd = signed_distance(q, poly)
            assert (sd > 0) == ray_cast_inside(q, poly.vertices)
            assert abs(sd) == pytest.approx(brute_distance(q, poly.vertices), rel=1e-12, abs=1e-14)


def test_orientation_normalized():
    cw = JordanPolygon([(0, 0), (0, 1), (1, 1), (1, 0)])
    assert polygon_area(cw) == pytest.approx(1.0)
    v = np.asarray(cw.vertices)
    e = np.roll(v, -1, axis=0) - v
    nxt = np.roll(e, -1, axis=0)
    cross = e[:, 0] * nxt[:, 1] - e[:, 1] * nxt[:, 0]
    assert np.all(cross >= 0)


def test_construction_rejections():
    with pytest.raises(ValueError):
        JordanPolygon([(0, 0), (1, 0)])
    with pytest.raises(ValueError):
        JordanPolygon([(0, 0), (1, 0), (1, 0), (0, 1)])  # zero-length edge
    with pytest.raises(ValueError):
        JordanPolygon([(0, 0), (4, 0), (4, 3), (2, -1), (0, 3)])  # self-intersection
    # trusted skips the O(E^2) pass but not the cheap checks
    with pytest.raises(ValueError):
        JordanPolygon([(0, 0), (1, 0), (1, 0), (0, 1)], trusted=True)


def test_is_convex(square, k2):
    assert is_convex(square)
    assert not is_convex(k2)  # reflex vertices at the star notches
    collinear = JordanPolygon([(0, 0), (1, 0), (2, 0), (1, 2)])
    assert is_convex(collinear)


def test_chebyshev_center_examples(square, rect, k1):
    c, r = chebyshev_center(square)
    assert (c.x, c.y, r) == pytest.approx((0.5, 0.5, 0.5), abs=1e-9)
    c, r = chebyshev_center(rect)
    assert (c.x, c.y, r) == pytest.approx((1.0, 0.5, 0.5), abs=1e-9)
    c, r = chebyshev_center(k1)
    assert r == pytest.approx(SQRT3 / 2.0, abs=1e-9)
    assert (c.x, c.y) == pytest.approx((1.5, SQRT3 / 2.0), abs=1e-8)


def test_chebyshev_rejects_nonconvex(k2):
    with pytest.raises(NonConvexInput):
        chebyshev_center(k2)


def test_chebyshev_matches_grid_max(square, field_cache):
    f = field_cache(square, 128)
    _, r = chebyshev_center(square)
    assert abs(r - float(np.max(f.values))) <= 2.0 * f.cell


def test_polygon_json_round_trip(k2, tmp_path):
    obj = polygon_to_json(k2)
    again = polygon_from_json(json.loads(json.dumps(obj)))
    assert np.allclose(again.vertices, k2.vertices)
    with pytest.raises(ValueError):
        polygon_from_json({"points": []})


# -- arc polygons -----------------------------------------------------------


def test_arc_polygon_full_circle():
    circle = ArcPolygon([Arc((2.0, -1.0), 1.5, 0.3, 0.3, ccw=True)])
    assert circle.area() == pytest.approx(math.pi * 1.5**2, rel=1e-14)
    assert circle.perimeter() == pytest.approx(2.0 * math.pi * 1.5, rel=1e-14)
    assert circle.pieces[0].sweep == pytest.approx(2.0 * math.pi)


def test_arc_polygon_rejects_open_chain():
    with pytest.raises(ValueError):
        ArcPolygon([Segment((0.0, 0.0), (1.0, 0.0)), Segment((1.1, 0.0), (0.0, 0.0))])
    with pytest.raises(ValueError):
        ArcPolygon([Arc((0.0, 0.0), -1.0, 0.0, 1.0)])


def test_arc_polygon_mixed_quarter():
    # unit square with one quarter-circle corner of radius 1 at the origin
    pieces = [
        Segment((1.0, 0.0), (1.0, 1.0)),
        Segment((1.0, 1.0), (0.0, 1.0)),
        Arc((1.0, 1.0), 1.0, math.pi, 1.5 * math.pi, ccw=True),
    ]
    ap = ArcPolygon(pieces)
    assert ap.area() == pytest.approx(math.pi / 4.0, rel=1e-13)
    assert ap.perimeter() == pytest.approx(2.0 + math.pi / 2.0, rel=1e-13)
