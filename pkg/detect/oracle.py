"""Exhaustive convex-hull oracle for small instances.

By Gordan's alternative, there is no strictly positive portfolio iff the
origin lies in the convex hull of the state vectors y^w. Caratheodory lets
us test only subsets of min(Omega, N + 1) states, so the oracle is exact but
exponential; it exists to cross-check the simplex detector.
"""

from __future__ import annotations

import itertools

import numpy as np

from core.models.verdicts import ArbitrageVerdict

MAX_ORACLE_ASSETS = 6
MAX_ORACLE_STATES = 12


def _hull_weights(M: np.ndarray, rhs: np.ndarray) -> list[np.ndarray]:
    """Solve each square system in the batch, falling back to lstsq if singular."""
    try:
        return list(np.linalg.solve(M, rhs[None, :, None])[..., 0])
    except np.linalg.LinAlgError:
        return [np.linalg.lstsq(m, rhs, rcond=None)[0] for m in M]


def contains_origin(returns: np.ndarray, *, eps: float = 1e-12, residual_tol: float = 1e-9) -> bool:
    """True iff 0 is in conv{y^w}, up to the given tolerances."""
    Y = np.asarray(returns, dtype=float)
    N, Omega = Y.shape
    rhs = np.zeros(N + 1)
    rhs[N] = 1.0
    k = min(Omega, N + 1)

    subsets = np.array(list(itertools.combinations(range(Omega), k)), dtype=np.intp)
    M = np.empty((len(subsets), N + 1, k))
    M[:, :N, :] = np.transpose(Y[:, subsets], (1, 0, 2))
    M[:, N, :] = 1.0

    if k == N + 1:
        candidates = _hull_weights(M, rhs)
    else:
        candidates = [np.linalg.lstsq(m, rhs, rcond=None)[0] for m in M]

    for m, lam in zip(M, candidates):
        if lam.min() >= -eps and np.linalg.norm(m @ lam - rhs) < residual_tol:
            return True
    return False


def detect_hull_oracle(
    returns: np.ndarray,
    *,
    max_assets: int = MAX_ORACLE_ASSETS,
    max_states: int = MAX_ORACLE_STATES,
) -> ArbitrageVerdict:
    """Classify a small instance by enumerating Caratheodory subsets."""
    Y = np.asarray(returns, dtype=float)
    if Y.ndim != 2 or Y.shape[0] < 1 or Y.shape[1] < 1:
        raise ValueError(f"Excess returns must be a non-empty N x Omega matrix, got shape {Y.shape}")
    if not np.isfinite(Y).all():
        raise ValueError("Excess returns contain NaN or infinite entries")
    N, Omega = Y.shape
    if N > max_assets or Omega > max_states:
        raise ValueError(
            f"Hull oracle limited to N <= {max_assets}, Omega <= {max_states}; got N={N}, Omega={Omega}"
        )
    kind = "zero_volume" if contains_origin(Y) else "infinite_volume"
    return ArbitrageVerdict(kind=kind, detector="hull_oracle")


class HullOracleDetector:
    """Registry-facing wrapper around :func:`detect_hull_oracle`."""

    @property
    def name(self) -> str:
        return "hull_oracle"

    def detect(self, returns: np.ndarray) -> ArbitrageVerdict:
        return detect_hull_oracle(returns)
