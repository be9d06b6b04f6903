"""Critical lines n_c(parameter) in the thermodynamic limit or at finite size."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence

from scipy import optimize

from core.models.market import PerturbedUniform, SubsetUniform, with_parameter
from core.models.theory import CriticalLine, Interpretation, SaddleOptions
from theory.coefficients import THERMODYNAMIC, OmegaArg, cov_coefficient
from theory.saddle import SaddleConvergenceError, reduced_critical_n, solve_critical_n

logger = logging.getLogger(__name__)


def _check_grid(grid: Sequence[float]) -> list[float]:
    values = [float(v) for v in grid]
    if not values:
        raise ValueError("Parameter grid is empty")
    if any(not math.isfinite(v) for v in values):
        raise ValueError(f"Parameter grid has non-finite values: {values}")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError(f"Parameter grid must be strictly increasing: {values}")
    return values


def _flag_non_monotone(line: CriticalLine) -> None:
    if line.param_name != "kappa":
        return
    for (p0, n0), (p1, n1) in zip(line.points, line.points[1:]):
        if n1 < n0 - 1e-12:
            logger.warning(
                "n_c decreases in kappa between %.4g (%.6f) and %.4g (%.6f)", p0, n0, p1, n1
            )


def critical_line(
    family: SubsetUniform | PerturbedUniform,
    param_name: str,
    grid: Sequence[float],
    Omega: OmegaArg = THERMODYNAMIC,
    interpretation: Interpretation = "direct",
    opts: SaddleOptions | None = None,
) -> CriticalLine:
    """Solve the saddle system at every grid value, seeding each from the last."""
    values = _check_grid(grid)
    points: list[tuple[float, float]] = []
    seed: tuple[float, float] | None = None

    for value in values:
        member = with_parameter(family, param_name, value)
        cc = cov_coefficient(member, Omega, interpretation)
        if math.isinf(cc.c):
            points.append((value, 0.0))
            seed = None
            continue
        try:
            solution = solve_critical_n(cc, opts, seed=seed)
        except SaddleConvergenceError as exc:
            raise SaddleConvergenceError(
                f"Critical line failed at {param_name}={value}: {exc}",
                xi=exc.xi,
                n=exc.n,
                residual_norm=exc.residual_norm,
                coefficient=exc.coefficient,
                parameter=value,
            ) from exc
        points.append((value, solution.n_c))
        seed = (solution.xi, solution.n_c) if math.isfinite(solution.xi) else None

    line = CriticalLine(
        family=family.model_dump(),
        param_name=param_name,
        interpretation=interpretation,
        points=points,
        Omega_used=Omega if Omega == THERMODYNAMIC else int(Omega),
    )
    _flag_non_monotone(line)
    logger.debug("Critical line over %s: %d points (Omega=%s)", param_name, len(points), Omega)
    return line


def _self_consistent_n(
    member: SubsetUniform | PerturbedUniform,
    N: int,
    interpretation: Interpretation,
    lo: float = 1e-9,
) -> float:
    """Solve n = n_c(c(Omega = N / n)) for one family member."""

    def gap(n: float) -> float:
        cc = cov_coefficient(member, max(1.0, N / n), interpretation)
        return n - reduced_critical_n(cc)

    if gap(1.0) <= 0.0:
        return 1.0
    if gap(lo) >= 0.0:
        return 0.0
    return float(optimize.brentq(gap, lo, 1.0, xtol=1e-12, maxiter=500))


def critical_line_finite_n(
    family: SubsetUniform | PerturbedUniform,
    param_name: str,
    grid: Sequence[float],
    N: int,
    interpretation: Interpretation = "direct",
) -> CriticalLine:
    """Critical line at a fixed number of assets N.

    The number of states follows the density, Omega = N / n, so the
    coefficient itself moves along the line; each point is the
    self-consistent density.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    values = _check_grid(grid)
    points = []
    for value in values:
        member = with_parameter(family, param_name, value)
        points.append((value, _self_consistent_n(member, N, interpretation)))
    return CriticalLine(
        family=family.model_dump(),
        param_name=param_name,
        interpretation=interpretation,
        points=points,
        Omega_used=None,
        N_used=N,
    )
