"""Gaussian half-moments I_n(w0) = E_w[(w + w0)^n ; w + w0 > 0], w ~ N(0, 1)."""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate
from scipy.special import ndtr

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

# Upper truncation of the quadrature, in standard deviations.
QUAD_CUTOFF = 10.0


def normal_pdf(w):
    return _INV_SQRT_2PI * np.exp(-0.5 * np.square(w))


def _scalar(value):
    return float(value) if np.ndim(value) == 0 else value


def i1(w0):
    """I_1(w0) = phi(w0) + w0 Phi(w0). Accepts scalars or arrays."""
    w0 = np.asarray(w0, dtype=float)
    return _scalar(normal_pdf(w0) + w0 * ndtr(w0))


def i2(w0):
    """I_2(w0) = (1 + w0^2) Phi(w0) + w0 phi(w0). Accepts scalars or arrays."""
    w0 = np.asarray(w0, dtype=float)
    return _scalar((1.0 + w0 * w0) * ndtr(w0) + w0 * normal_pdf(w0))


def i_n_quadrature(order: int, w0: float) -> float:
    """Adaptive quadrature of the defining expectation.

    Integrates u^order phi(u - w0) over u in [0, w0 + QUAD_CUTOFF], which is
    the w-range [-w0, QUAD_CUTOFF] after the shift u = w + w0.
    """
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    if not math.isfinite(w0):
        raise ValueError(f"w0 must be finite, got {w0}")
    upper = w0 + QUAD_CUTOFF
    if upper <= 0.0:
        return 0.0

    def integrand(u: float) -> float:
        return u**order * _INV_SQRT_2PI * math.exp(-0.5 * (u - w0) ** 2)

    points = [w0] if 0.0 < w0 < upper else None
    value, _ = integrate.quad(integrand, 0.0, upper, epsabs=1e-14, epsrel=1e-13, limit=500, points=points)
    return float(value)
