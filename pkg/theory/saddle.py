"""Saddle-point systems for the critical asset density n_c.

Both branches are written in (xi, n) with a = xi * sqrt(n |c|):

    c < 0:  f1 = 1 + xi^2 - I2(a) / n      f2 = -xi + sqrt(|c| / n) I1(a)
    c > 0:  f1 = 1 - xi^2 - I2(a) / n      f2 =  xi + sqrt(c / n) I1(a)

Eliminating xi through f2 gives a + c I1(a) = 0, independent of n, and
then f1 reduces to n = Phi(a). The reduced form has a unique root for
c > -1 and is the fallback when Newton fails.
"""

from __future__ import annotations

import logging
import math

import numpy as np
from scipy import optimize
from scipy.special import ndtr

from core.models.theory import CovCoefficient, SaddleOptions, SaddleSolution
from theory.moments import i1, i2

logger = logging.getLogger(__name__)


class SaddleConvergenceError(RuntimeError):
    """No root of the saddle system was certified."""

    def __init__(
        self,
        message: str,
        *,
        xi: float,
        n: float,
        residual_norm: float,
        coefficient: CovCoefficient,
        parameter: float | None = None,
    ) -> None:
        super().__init__(message)
        self.xi = xi
        self.n = n
        self.residual_norm = residual_norm
        self.coefficient = coefficient
        self.parameter = parameter


class _NewtonFailure(Exception):
    def __init__(self, x: np.ndarray, norm: float) -> None:
        super().__init__()
        self.x = x
        self.norm = norm


def _residual_vector(ceff: float, xi: float, n: float) -> np.ndarray:
    m = abs(ceff)
    a = xi * math.sqrt(n * m)
    if ceff < 0:
        return np.array([1.0 + xi * xi - i2(a) / n, -xi + math.sqrt(m / n) * i1(a)])
    return np.array([1.0 - xi * xi - i2(a) / n, xi + math.sqrt(m / n) * i1(a)])


def saddle_residuals(n: float, xi: float, cc: CovCoefficient) -> tuple[float, float]:
    """(f1, f2) of the branch selected by the sign of the interpreted coefficient."""
    if not n > 0:
        raise ValueError(f"Asset density n must be positive, got {n}")
    f1, f2 = _residual_vector(cc.effective, xi, n)
    return float(f1), float(f2)


def _reduced_root(ceff: float) -> float:
    """Root a of a + ceff * I1(a) = 0 for ceff > -1."""
    if ceff == 0.0:
        return 0.0

    def g(a: float) -> float:
        return a + ceff * i1(a)

    if ceff > 0:
        lo, hi = -1.0, 0.0
        while g(lo) >= 0.0:
            lo *= 2.0
    else:
        lo, hi = 0.0, 1.0
        while g(hi) <= 0.0:
            hi *= 2.0
            if hi > 1e6:
                raise ValueError(f"No bracket for the reduced saddle root at c={ceff}")
    return float(optimize.brentq(g, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500))


def reduced_critical_n(cc: CovCoefficient) -> float:
    """n_c = Phi(a*) from the one-dimensional reduced system."""
    ceff = cc.effective
    if ceff <= -1.0:
        return 1.0
    return float(ndtr(_reduced_root(ceff)))


def _reduced_solution(ceff: float) -> tuple[float, float]:
    a = _reduced_root(ceff)
    n = float(ndtr(a))
    xi = a / math.sqrt(n * abs(ceff))
    return xi, n


def _newton(ceff: float, x0: np.ndarray, opts: SaddleOptions) -> tuple[np.ndarray, int, float]:
    """Damped Newton with a central-difference Jacobian on one branch."""
    sign = -1.0 if ceff > 0 else 1.0  # xi <= 0 on the positive branch, >= 0 on the negative
    x = np.array(x0, dtype=float)
    F = _residual_vector(ceff, *x)
    norm = float(np.linalg.norm(F))

    for iteration in range(opts.max_iter + 1):
        if norm < opts.tol:
            return x, iteration, norm
        if iteration == opts.max_iter:
            break

        J = np.empty((2, 2))
        for j in range(2):
            h = opts.fd_step * max(1.0, abs(x[j]))
            up, down = x.copy(), x.copy()
            up[j] += h
            down[j] -= h
            if down[1] <= 0.0:
                down[1] = x[1] * 0.5
                h_eff = up[j] - down[j]
            else:
                h_eff = 2.0 * h
            J[:, j] = (_residual_vector(ceff, *up) - _residual_vector(ceff, *down)) / h_eff
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            raise _NewtonFailure(x, norm) from None

        damping = 1.0
        while damping >= opts.min_damping:
            trial = x + damping * step
            trial[0] = sign * max(sign * trial[0], 0.0)
            if trial[1] > 0.0:
                F_trial = _residual_vector(ceff, *trial)
                trial_norm = float(np.linalg.norm(F_trial))
                if trial_norm < (1.0 - 1e-4 * damping) * norm:
                    x, F, norm = trial, F_trial, trial_norm
                    break
            damping *= 0.5
        else:
            raise _NewtonFailure(x, norm)

    raise _NewtonFailure(x, norm)


def _continuation(ceff: float, opts: SaddleOptions, seed: tuple[float, float] | None) -> tuple[np.ndarray, int, float]:
    if seed is not None and math.isfinite(seed[0]) and seed[0] * ceff <= 0.0 and seed[1] > 0.0:
        try:
            return _newton(ceff, np.array(seed), opts)
        except _NewtonFailure:
            logger.debug("Seeded Newton failed at c=%g; restarting from the c=0 anchor", ceff)

    x = np.array([0.0, 0.5])
    total = 0
    norm = 0.0
    for k in range(1, opts.continuation_steps + 1):
        x, iterations, norm = _newton(ceff * k / opts.continuation_steps, x, opts)
        total += iterations
    return x, total, norm


def solve_critical_n(
    cc: CovCoefficient,
    opts: SaddleOptions | None = None,
    seed: tuple[float, float] | None = None,
) -> SaddleSolution:
    """Jointly solve f1 = f2 = 0 for (xi, n_c).

    ``seed`` is an optional (xi, n) starting point, typically the solution
    at the neighbouring parameter value of a critical line.
    """
    opts = opts or SaddleOptions()
    ceff = cc.effective
    if not math.isfinite(ceff):
        raise ValueError(f"Covariance coefficient must be finite, got {cc.c}")

    if ceff == 0.0:
        return SaddleSolution(xi=0.0, n_c=0.5, branch="degenerate_zero", method="analytic", coefficient=cc)
    if ceff <= -1.0:
        return SaddleSolution(xi=math.inf, n_c=1.0, branch="degenerate_unity", method="analytic", coefficient=cc)
    if ceff + 1.0 < opts.unity_band:
        xi, n = _reduced_solution(ceff)
        return SaddleSolution(
            xi=xi,
            n_c=n,
            residual_norm=float(np.linalg.norm(_residual_vector(ceff, xi, n))),
            branch="degenerate_unity",
            method="bisection",
            coefficient=cc,
        )

    branch = "negative_c" if ceff < 0 else "positive_c"
    try:
        x, iterations, norm = _continuation(ceff, opts, seed)
        method = "newton"
    except _NewtonFailure as failure:
        logger.debug("Newton stalled at c=%g (|F|=%.2e); using the reduced solve", ceff, failure.norm)
        xi, n = _reduced_solution(ceff)
        x = np.array([xi, n])
        norm = float(np.linalg.norm(_residual_vector(ceff, xi, n)))
        iterations = 0
        method = "bisection"

    if not norm < opts.tol or not 0.0 < x[1] <= 1.0:
        raise SaddleConvergenceError(
            f"Saddle solve did not converge at c={cc.c} (|F|={norm:.3e}, n={x[1]:.6g})",
            xi=float(x[0]),
            n=float(x[1]),
            residual_norm=norm,
            coefficient=cc,
        )
    logger.debug("Saddle c=%g -> n_c=%.10f via %s (%d iterations)", ceff, x[1], method, iterations)
    return SaddleSolution(
        xi=float(x[0]),
        n_c=float(x[1]),
        residual_norm=norm,
        branch=branch,
        method=method,
        iterations=iterations,
        coefficient=cc,
    )
