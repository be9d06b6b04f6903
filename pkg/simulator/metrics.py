"""Grid metrics -- empirical transition lines and their comparison with theory."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence

import numpy as np

from core.models.market import PerturbedUniform
from core.models.sweeps import (
    CalibrationReport,
    DeviationRow,
    LineComparison,
    MonotonicityViolation,
    PhaseGrid,
    TransitionLine,
)
from core.models.theory import CriticalLine
from theory.lines import critical_line, critical_line_finite_n

logger = logging.getLogger(__name__)

INTERPRETATIONS = ("direct", "sqrt")


def _row_crossing(n_grid: Sequence[float], row: Sequence[float], level: float) -> float | None:
    """n at the first adjacent pair bracketing ``level``, linearly interpolated."""
    for j in range(len(row) - 1):
        a, b = row[j], row[j + 1]
        if math.isnan(a) or math.isnan(b) or a == b:
            continue
        if min(a, b) <= level <= max(a, b):
            n0, n1 = n_grid[j], n_grid[j + 1]
            return n0 + (level - a) / (b - a) * (n1 - n0)
    return None


def extract_transition(grid: PhaseGrid, level: float = 0.5) -> TransitionLine:
    """Where each parameter row of the grid crosses ``level``.

    Rows that never cross are censored: "below" when the whole row sits at
    or above the level (the transition lies below the n grid), "above"
    otherwise.
    """
    spec = grid.spec
    line = TransitionLine(param_name=spec.param_name, level=level)
    for value, row in zip(spec.param_grid, grid.fraction):
        n_star = _row_crossing(spec.n_grid, row, level)
        if n_star is not None:
            line.points.append((value, n_star))
            continue
        finite = [f for f in row if not math.isnan(f)]
        side = "below" if finite and all(f >= level for f in finite) else "above"
        line.censored.append((value, side))
        logger.warning("No crossing of %.2f at %s=%g (transition %s the n grid)", level, spec.param_name, value, side)
    return line


def compare_lines(
    empirical: TransitionLine,
    analytic: CriticalLine,
    interpretation: str | None = None,
) -> LineComparison:
    """Deviation of the analytic line from the empirical one.

    The analytic line is interpolated at the empirical parameter values that
    fall inside its range; empirical points outside it are skipped.
    """
    if not empirical.points:
        raise ValueError("Empirical transition line has no points")
    if not analytic.points:
        raise ValueError("Analytic critical line has no points")
    a_params = np.array(analytic.params)
    a_n = np.array(analytic.n_values)
    lo, hi = a_params.min(), a_params.max()

    rows = []
    for param, n_emp in empirical.points:
        if not lo - 1e-12 <= param <= hi + 1e-12:
            continue
        n_an = float(np.interp(param, a_params, a_n))
        rows.append(DeviationRow(param=param, empirical_n=n_emp, analytic_n=n_an, abs_dev=abs(n_emp - n_an)))
    if not rows:
        e_params = [p for p, _ in empirical.points]
        raise ValueError(
            f"Parameter ranges do not overlap: empirical [{min(e_params)}, {max(e_params)}] "
            f"vs analytic [{lo}, {hi}]"
        )

    deviations = [row.abs_dev for row in rows]
    return LineComparison(
        interpretation=interpretation or analytic.interpretation,
        max_abs_dev=max(deviations),
        mean_abs_dev=sum(deviations) / len(deviations),
        rows=rows,
    )


def monotonicity_violations(grid: PhaseGrid, sigmas: float = 3.0) -> list[MonotonicityViolation]:
    """Drops in fraction along n larger than ``sigmas`` binomial standard errors."""
    spec = grid.spec
    R = spec.realizations
    violations = []
    for value, row in zip(spec.param_grid, grid.fraction):
        for j in range(len(row) - 1):
            a, b = row[j], row[j + 1]
            if math.isnan(a) or math.isnan(b) or b >= a:
                continue
            allowance = sigmas * math.sqrt((a * (1 - a) + b * (1 - b)) / R)
            if a - b > allowance:
                violations.append(MonotonicityViolation(
                    param=value,
                    n_from=spec.n_grid[j],
                    n_to=spec.n_grid[j + 1],
                    drop=a - b,
                    allowance=allowance,
                ))
    for v in violations:
        logger.warning(
            "Fraction drops by %.3f (allowance %.3f) at %s=%g between n=%g and n=%g",
            v.drop, v.allowance, spec.param_name, v.param, v.n_from, v.n_to,
        )
    return violations


def transition_width(grid: PhaseGrid, lo: float = 0.1, hi: float = 0.9) -> list[float | None]:
    """Per-row distance in n between the ``lo`` and ``hi`` crossings (None if either is missing)."""
    if not 0.0 <= lo < hi <= 1.0:
        raise ValueError(f"Need 0 <= lo < hi <= 1, got lo={lo}, hi={hi}")
    widths: list[float | None] = []
    for row in grid.fraction:
        n_lo = _row_crossing(grid.spec.n_grid, row, lo)
        n_hi = _row_crossing(grid.spec.n_grid, row, hi)
        widths.append(None if n_lo is None or n_hi is None else n_hi - n_lo)
    return widths


def analytic_line_for(grid: PhaseGrid, interpretation: str = "direct") -> CriticalLine:
    """The analytic line matching a grid: thermodynamic for subset
    measures, finite-size at the grid's N for perturbed ones."""
    spec = grid.spec
    if isinstance(spec.family, PerturbedUniform):
        return critical_line_finite_n(spec.family, spec.param_name, spec.param_grid, spec.N, interpretation)
    return critical_line(spec.family, spec.param_name, spec.param_grid, interpretation=interpretation)


def calibrate_interpretations(grid: PhaseGrid, level: float = 0.5) -> CalibrationReport:
    """Compare the grid's empirical transition with both covariance interpretations."""
    empirical = extract_transition(grid, level)
    comparisons = {
        name: compare_lines(empirical, analytic_line_for(grid, name), interpretation=name)
        for name in INTERPRETATIONS
    }
    preferred = min(comparisons, key=lambda name: comparisons[name].max_abs_dev)
    for name, result in comparisons.items():
        logger.info(
            "Interpretation %s: max |dev| = %.4f, mean |dev| = %.4f over %d points",
            name, result.max_abs_dev, result.mean_abs_dev, len(result.rows),
        )
    return CalibrationReport(empirical=empirical, comparisons=comparisons, preferred=preferred)
