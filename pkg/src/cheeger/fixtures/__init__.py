"""Bundled polygon fixtures used by the CLI examples and the test suite.

square, rect_2x1, k1..k5 (snowflake construction steps), and heart (a cusped
two-lobe domain whose inner parallel sets disconnect across the bracket; its
boundary arcs are approximated by 256 chords).
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from ..geometry import JordanPolygon, load_polygon

NAMES = ("square", "rect_2x1", "k1", "k2", "k3", "k4", "k5", "heart")


def fixture_path(name: str) -> Path:
    if name not in NAMES:
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(NAMES)}")
    return Path(str(resources.files(__package__) / f"{name}.json"))


def load_fixture(name: str) -> JordanPolygon:
    return load_polygon(fixture_path(name))
