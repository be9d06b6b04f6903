"""Arbitrage-volume verdict via linear programming.

The market has an arbitrage (infinite volume) iff some portfolio z with
|z_i| <= 1 earns a strictly positive excess return in every state:

    t* = max_{z, t} t   s.t.  sum_i z_i y_i^w >= t for all w,  |z_i| <= 1

The primal has Omega constraints, so we solve its dual, which has only
N + 1 rows:

    min sum(a + b)  s.t.  Y lam - a + b = 0,  sum(lam) = 1,  lam, a, b >= 0

t* is the dual objective and the witness z is read off the simplex prices.
"""

from __future__ import annotations

import logging

import numpy as np

from core.models.verdicts import ArbitrageVerdict, DetectorConfig
from detect.simplex import SimplexResult, UndecidedError, solve_standard_form

logger = logging.getLogger(__name__)

__all__ = ["SimplexDetector", "UndecidedError", "detect", "verify_witness"]


def _validate_returns(returns: np.ndarray) -> np.ndarray:
    Y = np.asarray(returns, dtype=float)
    if Y.ndim != 2 or Y.shape[0] < 1 or Y.shape[1] < 1:
        raise ValueError(f"Excess returns must be a non-empty N x Omega matrix, got shape {Y.shape}")
    if not np.isfinite(Y).all():
        raise ValueError("Excess returns contain NaN or infinite entries")
    return Y


def _build_dual(Y: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    N, Omega = Y.shape
    A = np.zeros((N + 1, Omega + 2 * N))
    A[:N, :Omega] = Y
    A[:N, Omega:Omega + N] = -np.eye(N)
    A[:N, Omega + N:] = np.eye(N)
    A[N, :Omega] = 1.0
    b = np.zeros(N + 1)
    b[N] = 1.0
    c = np.zeros(Omega + 2 * N)
    c[Omega:] = 1.0

    # All weight on the state closest to the origin; slacks absorb its returns.
    start = int(np.argmin(np.abs(Y).sum(axis=0)))
    rows = np.arange(N)
    basis = np.where(Y[:, start] > 0, Omega + rows, Omega + N + rows)
    basis = np.append(basis, start)
    return A, b, c, basis


def solve_arbitrage_lp(returns: np.ndarray, config: DetectorConfig | None = None) -> tuple[SimplexResult, np.ndarray]:
    """Run the dual simplex and return the raw result plus the clipped witness."""
    cfg = config or DetectorConfig()
    Y = _validate_returns(returns)
    N = Y.shape[0]
    A, b, c, basis = _build_dual(Y)
    result = solve_standard_form(
        A,
        b,
        c,
        basis,
        max_pivots=cfg.max_pivots,
        pivot_rule=cfg.pivot_rule,
        stall_limit=cfg.stall_limit,
        refactor_every=cfg.refactor_every,
    )
    witness = np.clip(-result.duals[:N], -1.0, 1.0)
    return result, witness


def verify_witness(returns: np.ndarray, z: np.ndarray, tol: float = 1e-9) -> bool:
    """True iff the portfolio z has excess return above tol in every state."""
    Y = np.asarray(returns, dtype=float)
    z = np.asarray(z, dtype=float)
    if Y.ndim != 2 or z.shape != (Y.shape[0],):
        raise ValueError(f"Witness of shape {z.shape} does not match returns of shape {Y.shape}")
    return bool((z @ Y).min() > tol)


def detect(returns: np.ndarray, config: DetectorConfig | None = None) -> ArbitrageVerdict:
    """Classify one instance as ZeroVolume or InfiniteVolume.

    Raises ValueError on malformed input and UndecidedError if the pivot
    cap is hit. InfiniteVolume is only reported with a witness that passes
    ``verify_witness`` at the configured tolerance.
    """
    cfg = config or DetectorConfig()
    result, witness = solve_arbitrage_lp(returns, cfg)
    Y = np.asarray(returns, dtype=float)
    t_star = result.objective
    margin = float((witness @ Y).min())
    # z = 0 is feasible, so t* >= 0 and an exact zero is a clean ZeroVolume
    marginal = cfg.tol / cfg.marginal_factor < t_star < cfg.marginal_factor * cfg.tol

    if t_star > cfg.tol and margin > cfg.tol:
        return ArbitrageVerdict(
            kind="infinite_volume",
            witness=witness.tolist(),
            margin=margin,
            t_star=t_star,
            pivots=result.pivots,
            marginal=marginal,
        )

    if t_star > cfg.tol:
        # Optimum says arbitrage but the recovered prices fail the check.
        logger.warning("Witness check failed (t*=%.3e, margin=%.3e); reporting zero volume", t_star, margin)
        marginal = True
    return ArbitrageVerdict(
        kind="zero_volume",
        witness=None,
        margin=margin,
        t_star=t_star,
        pivots=result.pivots,
        marginal=marginal,
    )


class SimplexDetector:
    """Registry-facing wrapper around :func:`detect`."""

    def __init__(self, config: DetectorConfig | None = None) -> None:
        self.config = config or DetectorConfig()

    @property
    def name(self) -> str:
        return "simplex"

    def detect(self, returns: np.ndarray) -> ArbitrageVerdict:
        return detect(returns, self.config)
