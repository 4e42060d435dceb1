"""Report figures for the snowflake pipeline (matplotlib, Agg backend)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .koch import KochSolution


def koch_convergence_figure(solutions: list[KochSolution], path: str | Path) -> None:
    """Plot h at each construction step with its enclosing interval for the
    limit constant, and save to ``path`` (format from the extension)."""
    steps = [s.n for s in solutions]
    hs = [s.h for s in solutions]
    fig, ax = plt.subplots(figsize=(6.0, 3.8))
    ax.plot(steps, hs, "o-", color="#3182bd", label="h at step n")
    banded = [s for s in solutions if s.h_interval is not None]
    if banded:
        ax.fill_between(
            [s.n for s in banded],
            [s.h_interval[0] for s in banded],
            [s.h_interval[1] for s in banded],
            color="#9ecae1",
            alpha=0.6,
            label="limit enclosure",
        )
    ax.set_xlabel("construction step n")
    ax.set_ylabel("Cheeger constant")
    ax.set_xticks(steps)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
