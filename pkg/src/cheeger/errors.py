"""Exception types shared across the package."""

from __future__ import annotations


class CheegerError(Exception):
    """Base class for all package-specific errors."""


class NonConvexInput(CheegerError):
    """A convex-only operation received a non-convex polygon."""


class ResolutionTooSmall(CheegerError):
    """Distance-field resolution below the supported minimum."""


class DegenerateDomain(CheegerError):
    """Bracket construction failed; the domain is numerically degenerate."""


class NeckDetected(CheegerError):
    """The no-neck check failed at some sampled radius."""

    def __init__(self, radius: float, components: int):
        super().__init__(
            f"inner parallel set splits into {components} components at radius {radius:.6g}"
        )
        self.radius = radius
        self.components = components


class NoSignChange(CheegerError):
    """Area balance does not change sign across the bracket beyond noise."""


class EmptyRetract(CheegerError):
    """The inner parallel set is empty at the requested radius."""


class CapExceeded(CheegerError):
    """Snowflake construction step above the practical cap."""


class DomainError(CheegerError, ValueError):
    """Arguments outside the mathematical domain of a formula."""


class CaseMismatch(CheegerError):
    """Gap-straddling area evaluated with the wrong distance case."""


class DisconnectedDomain(CheegerError):
    """Domain rasterizes to multiple components at the given resolution."""
