"""Cheeger constants and maximal Cheeger sets of planar Jordan polygons.

The solver finds the radius r with pi r^2 = |inner parallel set at r|, which
equals 1/h for domains whose inner parallel sets stay connected across the
bracket [inradius/2, sqrt(area/pi)/2].  A fully analytic pipeline covers the
Koch snowflake construction steps.
"""

from __future__ import annotations

from .errors import (
    CapExceeded,
    CaseMismatch,
    CheegerError,
    DegenerateDomain,
    DisconnectedDomain,
    DomainError,
    EmptyRetract,
    NeckDetected,
    NonConvexInput,
    NoSignChange,
    ResolutionTooSmall,
)
from .geometry import (
    Arc,
    ArcPolygon,
    BBox,
    JordanPolygon,
    Point2,
    Segment,
    chebyshev_center,
    is_convex,
    load_polygon,
    polygon_area,
    polygon_from_json,
    polygon_perimeter,
    polygon_to_json,
    signed_distance,
)

__version__ = "0.1.0"

from .retract import (  # noqa: E402
    DistanceField,
    RetractEstimate,
    build_field,
    inner_retract_convex,
    minkowski_content,
    retract_area,
    retract_area_extrapolated,
    retract_components,
)
from .solver import (  # noqa: E402
    Bracket,
    CheegerConfig,
    CheegerReport,
    NeckCheck,
    bracket,
    neck_check,
    solve,
    steiner_ratio_error,
    steiner_verify,
)
from .cheeger_set import (  # noqa: E402
    CheegerSetGeometry,
    dilate_convex,
    dilate_grid,
    render_svg,
)
from .koch import (  # noqa: E402
    CantorData,
    KochSolution,
    area_balance,
    bases_beyond,
    cantor_gap_data,
    curvilinear_triangle_area,
    k1_closed_form,
    k2_closed_form,
    koch_polygon,
    radius_error_from_area,
    radius_tail_bound,
    solve_koch,
)
