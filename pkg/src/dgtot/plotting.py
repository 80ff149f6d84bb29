"""Figures for CLI reports: Hilbert functions, Betti tables, suite timings.

Figures are built on a bare ``matplotlib.figure.Figure`` so nothing touches
pyplot's global state; the output format follows the file extension.
"""

from __future__ import annotations

from matplotlib.figure import Figure
from matplotlib.ticker import MaxNLocator


def plot_hilbert(ax, dims: dict, title: str = "Hilbert function of H(M)") -> None:
    degs = sorted(int(d) for d in dims)
    vals = [dims[d] if d in dims else dims[str(d)] for d in degs]
    ax.bar(degs, vals, color="#4c72b0", width=0.8)
    ax.set_xlabel("internal degree")
    ax.set_ylabel("dimension")
    ax.set_title(title)
    ax.set_xlim(min(degs, default=0) - 1, max(degs, default=0) + 1)
    ax.xaxis.set_major_locator(MaxNLocator(integer=True))
    ax.yaxis.set_major_locator(MaxNLocator(integer=True))


def plot_betti(ax, table: dict, title: str = "Betti table") -> None:
    """``table[i][j]`` = β_{i,j}; drawn as an annotated grid (step × degree)."""
    steps = sorted(int(i) for i in table)
    cells = {(int(i), int(j)): c for i, row in table.items() for j, c in row.items()}
    degs = sorted({j for _, j in cells}) or [0]
    grid = [[cells.get((i, j), 0) for j in degs] for i in steps]
    top = max((c for row in grid for c in row), default=1)
    ax.imshow(grid, cmap="Blues", aspect="auto", vmin=0, vmax=2 * top)
    ax.set_xticks(range(len(degs)), [str(j) for j in degs])
    ax.set_yticks(range(len(steps)), [str(i) for i in steps])
    ax.set_xlabel("twist j")
    ax.set_ylabel("step i")
    for a, i in enumerate(steps):
        for b, j in enumerate(degs):
            if cells.get((i, j)):
                ax.text(b, a, str(cells[(i, j)]), ha="center", va="center")
    ax.set_title(title)


def plot_timings(ax, seconds: list, title: str = "seconds per instance") -> None:
    ax.plot(range(len(seconds)), seconds, marker=".", linestyle="none", color="#dd8452")
    ax.set_xlabel("instance")
    ax.set_ylabel("seconds")
    ax.set_title(title)


def render(path: str, panels: list) -> str:
    """``panels`` holds (plot_function, args) pairs; one subplot each, side by side."""
    n = max(1, len(panels))
    fig = Figure(figsize=(5 * n, 3.8))
    for k, (fn, args) in enumerate(panels):
        fn(fig.add_subplot(1, n, k + 1), *args)
    fig.tight_layout()
    fig.savefig(path)
    return path
