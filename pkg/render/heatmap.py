"""Phase-diagram heatmap as a standalone SVG document.

One rectangle per grid cell, coloured from dark (zero volume, fraction 0)
to light (infinite volume, fraction 1), with optional markers for the
analytic critical line and the empirical transition. Output bytes depend
only on the inputs.
"""

from __future__ import annotations

import io
import logging

import matplotlib

matplotlib.use("Agg")

import numpy as np
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.colors import LinearSegmentedColormap
from matplotlib.figure import Figure

from core.models.sweeps import PhaseGrid, TransitionLine
from core.models.theory import CriticalLine

logger = logging.getLogger(__name__)

ZERO_VOLUME_COLOR = "#0b2e6b"
INFINITE_VOLUME_COLOR = "#9fd3f2"
ANALYTIC_COLOR = "#d62728"
EMPIRICAL_COLOR = "#ffffff"

VOLUME_CMAP = LinearSegmentedColormap.from_list("arbvol_volume", [ZERO_VOLUME_COLOR, INFINITE_VOLUME_COLOR])
VOLUME_CMAP.set_bad("#808080")

_RC = {
    "svg.hashsalt": "arbvol",
    "svg.fonttype": "none",
    "font.size": 8,
}

_AXIS_LABELS = {"kappa": r"$\kappa$", "alpha": r"$\alpha$", "delta": r"$\Delta$"}


def cell_edges(values: list[float]) -> np.ndarray:
    """Rectangle edges: midpoints between grid values, half a step beyond the ends."""
    v = np.asarray(values, dtype=float)
    if v.size == 1:
        half = max(abs(v[0]) * 0.05, 0.05)
        return np.array([v[0] - half, v[0] + half])
    mid = (v[:-1] + v[1:]) / 2.0
    return np.concatenate([[v[0] - (mid[0] - v[0])], mid, [v[-1] + (v[-1] - mid[-1])]])


def render_heatmap(
    grid: PhaseGrid,
    analytic_line: CriticalLine | None = None,
    empirical_line: TransitionLine | None = None,
) -> str:
    """Render the grid (n on the x axis, the family parameter on y) as SVG text."""
    spec = grid.spec
    fraction = np.ma.masked_invalid(np.array(grid.fraction, dtype=float))
    if fraction.size == 0:
        raise ValueError("Cannot render an empty grid")

    with matplotlib.rc_context(_RC):
        fig = Figure(figsize=(6.0, 4.5))
        FigureCanvasSVG(fig)
        ax = fig.add_subplot()
        mesh = ax.pcolormesh(
            cell_edges(spec.n_grid),
            cell_edges(spec.param_grid),
            fraction,
            cmap=VOLUME_CMAP,
            vmin=0.0,
            vmax=1.0,
            shading="flat",
        )
        fig.colorbar(mesh, ax=ax, label="fraction with infinite volume")

        if analytic_line is not None and analytic_line.points:
            ax.plot(
                analytic_line.n_values,
                analytic_line.params,
                linestyle="none",
                marker="o",
                markersize=3.5,
                color=ANALYTIC_COLOR,
                label=f"analytic ({analytic_line.interpretation})",
            )
        if empirical_line is not None and empirical_line.points:
            ax.plot(
                [n for _, n in empirical_line.points],
                [p for p, _ in empirical_line.points],
                linestyle="none",
                marker="x",
                markersize=3.5,
                color=EMPIRICAL_COLOR,
                label=f"empirical ({empirical_line.level:g} level)",
            )
        if ax.get_legend_handles_labels()[0]:
            ax.legend(loc="upper left", frameon=True)

        ax.set_xlim(cell_edges(spec.n_grid)[[0, -1]])
        ax.set_ylim(cell_edges(spec.param_grid)[[0, -1]])
        ax.set_xlabel("n = N / Omega")
        ax.set_ylabel(_AXIS_LABELS.get(spec.param_name, spec.param_name))
        ax.set_title(f"{spec.family.kind} measures, N={spec.N}, R={spec.realizations}")

        buffer = io.StringIO()
        fig.savefig(buffer, format="svg", metadata={"Date": None})

    logger.debug("Rendered %d x %d heatmap", *fraction.shape)
    return buffer.getvalue()
