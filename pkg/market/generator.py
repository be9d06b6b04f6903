"""Market generation -- payoffs, prices under local measures, excess returns."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import ndtr

from core.models.market import (
    MarketInstance,
    MarketParams,
    MeasureSet,
    PerturbedUniform,
    SubsetUniform,
)
from core.protocols import MeasureSampler


def make_rng(seed: int | np.random.SeedSequence) -> np.random.Generator:
    """Random stream for one market (PCG64)."""
    return np.random.default_rng(seed)


def sample_payoffs(params: MarketParams, rng: np.random.Generator) -> np.ndarray:
    """N x Omega matrix of i.i.d. standard normal payoffs s_i^omega."""
    return rng.standard_normal((params.N, params.Omega))


def compute_prices(payoffs: np.ndarray, measures: MeasureSet | np.ndarray) -> np.ndarray:
    """p_i = sum_omega q_i^omega s_i^omega."""
    q = measures.values if isinstance(measures, MeasureSet) else np.asarray(measures)
    if q.shape != payoffs.shape:
        raise ValueError(f"Shape mismatch: measures {q.shape} vs payoffs {payoffs.shape}")
    return np.sum(q * payoffs, axis=1)


def compute_excess_returns(payoffs: np.ndarray, prices: np.ndarray) -> np.ndarray:
    """y_i^omega = s_i^omega - p_i."""
    if prices.ndim != 1 or prices.shape[0] != payoffs.shape[0]:
        raise ValueError(
            f"Shape mismatch: {prices.shape[0] if prices.ndim == 1 else prices.shape} prices "
            f"for {payoffs.shape[0]} assets"
        )
    return payoffs - prices[:, None]


def negative_fraction(measures: MeasureSet) -> float:
    """Fraction of strictly negative raw (pre-clipping) measure entries."""
    return float(np.mean(measures.raw < 0.0))


def expected_negative_fraction(delta: float, alpha: float, Omega: int) -> float:
    """P(q_i^omega < 0) for the projected perturbed-uniform family.

    The projected noise has variance (delta / Omega**alpha)(1 - 1/Omega), and
    q is negative when the noise falls below -1/Omega.
    """
    variance = delta / Omega**alpha * (1.0 - 1.0 / Omega)
    if variance <= 0.0:
        return 0.0
    return float(ndtr(-(1.0 / Omega) / math.sqrt(variance)))


def sample_market(
    params: MarketParams,
    family: SubsetUniform | PerturbedUniform,
    sampler: MeasureSampler,
    rng: np.random.Generator | None = None,
) -> MarketInstance:
    """Draw payoffs then measures from one stream and derive prices and returns."""
    if rng is None:
        rng = make_rng(params.seed)
    payoffs = sample_payoffs(params, rng)
    measures = sampler.sample(params, family, rng)
    prices = compute_prices(payoffs, measures)
    return MarketInstance(
        payoffs=payoffs,
        measures=measures,
        prices=prices,
        excess_returns=compute_excess_returns(payoffs, prices),
    )
