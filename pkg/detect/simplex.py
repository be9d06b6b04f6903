"""Revised simplex for min c.x s.t. A x = b, x >= 0, from a feasible basis.

Keeps an explicit basis inverse updated by elementary row operations and
refactorised every ``refactor_every`` pivots. Pricing is Dantzig's most
negative reduced cost, switching to Bland's smallest-index rule for good
once ``stall_limit`` consecutive degenerate pivots occur (or from the start
with ``pivot_rule="bland"``). Deterministic for a fixed input.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np

logger = logging.getLogger(__name__)


class UndecidedError(RuntimeError):
    """The simplex stopped without an optimality certificate."""

    def __init__(self, message: str, pivots: int, objective: float) -> None:
        super().__init__(message)
        self.pivots = pivots
        self.objective = objective


@dataclass
class SimplexResult:
    """Optimal basic solution with its dual prices."""

    x: np.ndarray
    basis: np.ndarray
    duals: np.ndarray
    objective: float
    pivots: int
    used_bland: bool


def solve_standard_form(
    A: np.ndarray,
    b: np.ndarray,
    c: np.ndarray,
    basis: np.ndarray,
    *,
    max_pivots: int = 50_000,
    pivot_rule: Literal["bland", "dantzig"] = "dantzig",
    stall_limit: int = 50,
    refactor_every: int = 64,
    cost_tol: float = 1e-11,
    pivot_tol: float = 1e-9,
) -> SimplexResult:
    """Minimise c.x over {A x = b, x >= 0} starting from a primal feasible basis."""
    m, ncols = A.shape
    basis = np.array(basis, dtype=np.intp)
    if basis.shape != (m,):
        raise ValueError(f"Basis needs {m} columns, got {basis.shape}")

    B_inv = np.linalg.inv(A[:, basis])
    x_B = B_inv @ b
    if x_B.min() < -1e-9:
        raise ValueError("Starting basis is not primal feasible")

    use_bland = pivot_rule == "bland"
    degenerate_run = 0
    pivots = 0

    while True:
        duals = c[basis] @ B_inv
        reduced = c - duals @ A
        reduced[basis] = 0.0
        candidates = np.flatnonzero(reduced < -cost_tol)
        if candidates.size == 0:
            break
        if pivots >= max_pivots:
            raise UndecidedError(
                f"Pivot cap of {max_pivots} reached without optimality",
                pivots=pivots,
                objective=float(c[basis] @ x_B),
            )

        if use_bland:
            entering = int(candidates[0])
        else:
            entering = int(candidates[np.argmin(reduced[candidates])])

        direction = B_inv @ A[:, entering]
        eligible = np.flatnonzero(direction > pivot_tol)
        if eligible.size == 0:
            raise UndecidedError(
                "Objective unbounded below (no ratio-test row)",
                pivots=pivots,
                objective=float(c[basis] @ x_B),
            )

        ratios = np.maximum(x_B[eligible], 0.0) / direction[eligible]
        step = ratios.min()
        ties = eligible[ratios <= step + 1e-12]
        if use_bland:
            leave = int(ties[np.argmin(basis[ties])])
        else:
            leave = int(ties[np.argmax(direction[ties])])

        pivot = direction[leave]
        x_B = x_B - step * direction
        x_B[leave] = step
        row = B_inv[leave] / pivot
        B_inv -= np.outer(direction, row)
        B_inv[leave] = row
        basis[leave] = entering
        pivots += 1

        if step <= pivot_tol:
            degenerate_run += 1
            if not use_bland and degenerate_run >= stall_limit:
                logger.debug("Stalled after %d degenerate pivots; switching to Bland", degenerate_run)
                use_bland = True
        else:
            degenerate_run = 0

        if pivots % refactor_every == 0:
            B_inv = np.linalg.inv(A[:, basis])
            x_B = B_inv @ b

    x_B = np.where(np.abs(x_B) < 1e-13, 0.0, x_B)
    x = np.zeros(ncols)
    x[basis] = x_B
    return SimplexResult(
        x=x,
        basis=basis,
        duals=duals,
        objective=float(c[basis] @ x_B),
        pivots=pivots,
        used_bland=use_bland,
    )
