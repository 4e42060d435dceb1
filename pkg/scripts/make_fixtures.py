#!/usr/bin/env python3
"""Regenerate the bundled polygon fixtures (run from the repo root)."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from cheeger.koch import koch_polygon

OUT = Path(__file__).resolve().parents[1] / "src" / "cheeger" / "fixtures"


def heart_vertices(chords_per_arc: int = 128) -> np.ndarray:
    """Two unit disks tangent at (1, 0) plus the rectangle [0,2]x[-1,0].

    Boundary: left circle swept ccw from the cusp to (0,-1), the bottom
    segment to (2,-1), then the right circle ccw back to the cusp.  Each
    3pi/2 arc is inscribed with ``chords_per_arc`` chords.
    """
    sweep = 1.5 * math.pi
    t_left = np.linspace(0.0, sweep, chords_per_arc + 1)
    left = np.column_stack([np.cos(t_left), np.sin(t_left)])
    t_right = np.linspace(1.5 * math.pi, 3.0 * math.pi, chords_per_arc + 1)
    right = np.column_stack([2.0 + np.cos(t_right), np.sin(t_right)])
    return np.vstack([left, right[:-1]])


def write(name: str, vertices) -> None:
    path = OUT / f"{name}.json"
    payload = {"vertices": [[float(x), float(y)] for x, y in np.asarray(vertices)]}
    path.write_text(json.dumps(payload) + "\n", encoding="utf-8")
    print(f"wrote {path} ({len(payload['vertices'])} vertices)")


def main() -> None:
    write("square", [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
    write("rect_2x1", [(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (0.0, 1.0)])
    for n in range(1, 6):
        write(f"k{n}", koch_polygon(n).vertices)
    write("heart", heart_vertices())


if __name__ == "__main__":
    main()
