from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from cheeger.fixtures import load_fixture
from cheeger.geometry import JordanPolygon
from cheeger.retract import build_field


@pytest.fixture(scope="session")
def square():
    return load_fixture("square")


@pytest.fixture(scope="session")
def rect():
    return load_fixture("rect_2x1")


@pytest.fixture(scope="session")
def k1():
    return load_fixture("k1")


@pytest.fixture(scope="session")
def k2():
    return load_fixture("k2")


@pytest.fixture(scope="session")
def k5():
    return load_fixture("k5")


@pytest.fixture(scope="session")
def heart():
    return load_fixture("heart")


@pytest.fixture(scope="session")
def field_cache():
    """Session-wide cache of distance fields keyed by (fixture id, resolution)."""
    cache: dict[tuple[int, int], object] = {}

    def get(p: JordanPolygon, resolution: int):
        key = (id(p), resolution)
        if key not in cache:
            cache[key] = build_field(p, resolution)
        return cache[key]

    return get
