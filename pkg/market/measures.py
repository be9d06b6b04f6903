"""Local-measure samplers for the subset-uniform and perturbed-uniform families."""

from __future__ import annotations

import logging
import math

import numpy as np

from core.models.market import MarketParams, MeasureSet, PerturbedUniform, SubsetUniform

logger = logging.getLogger(__name__)


def sample_subset_measures(
    params: MarketParams,
    K: int,
    rng: np.random.Generator,
    *,
    bernoulli: bool = False,
    family: SubsetUniform | None = None,
) -> MeasureSet:
    """Uniform measure over a random K-subset of states, independently per asset.

    The default draws exact size-K subsets without replacement. With
    ``bernoulli`` every state is kept with probability K / Omega and the row
    is normalised over its realised support; empty rows are redrawn.
    """
    N, Omega = params.N, params.Omega
    if not 1 <= K <= Omega:
        raise ValueError(f"Subset size K={K} out of range [1, {Omega}]")
    if family is None:
        family = SubsetUniform(K=K, bernoulli=bernoulli)

    resampled = 0
    if bernoulli:
        p = K / Omega
        mask = rng.random((N, Omega)) < p
        empty = ~mask.any(axis=1)
        while empty.any():
            count = int(empty.sum())
            resampled += count
            mask[empty] = rng.random((count, Omega)) < p
            empty = ~mask.any(axis=1)
        values = mask / mask.sum(axis=1, keepdims=True)
        if resampled:
            logger.debug("Redrew %d empty Bernoulli subset rows", resampled)
    else:
        chosen = np.argsort(rng.random((N, Omega)), axis=1)[:, :K]
        values = np.zeros((N, Omega))
        np.put_along_axis(values, chosen, 1.0 / K, axis=1)

    return MeasureSet(values=values, family=family, resampled_rows=resampled)


def sample_perturbed_measures(
    params: MarketParams,
    delta: float,
    alpha: float,
    hard_constraint: bool,
    rng: np.random.Generator,
    *,
    family: PerturbedUniform | None = None,
) -> MeasureSet:
    """1/Omega plus Gaussian noise of variance delta / Omega**alpha, projected to zero sum.

    With ``hard_constraint`` the projected values are kept in ``raw_values``,
    negative entries are clipped to zero and each row is renormalised.
    """
    if delta <= 0:
        raise ValueError(f"Perturbation variance delta={delta} must be positive")
    N, Omega = params.N, params.Omega
    if family is None:
        family = PerturbedUniform(delta=delta, alpha=alpha, hard_constraint=hard_constraint)

    scale = math.sqrt(delta / Omega**alpha)

    def draw(rows: int) -> np.ndarray:
        noise = rng.normal(0.0, scale, size=(rows, Omega))
        noise -= noise.mean(axis=1, keepdims=True)
        return 1.0 / Omega + noise

    raw = draw(N)
    if not hard_constraint:
        return MeasureSet(values=raw, family=family)

    resampled = 0
    clipped = np.where(raw > 0.0, raw, 0.0)
    totals = clipped.sum(axis=1)
    degenerate = totals <= 0.0
    while degenerate.any():
        count = int(degenerate.sum())
        resampled += count
        raw[degenerate] = draw(count)
        clipped[degenerate] = np.where(raw[degenerate] > 0.0, raw[degenerate], 0.0)
        totals = clipped.sum(axis=1)
        degenerate = totals <= 0.0
    if resampled:
        logger.warning("Resampled %d fully clipped measure rows", resampled)

    values = clipped / totals[:, None]
    return MeasureSet(values=values, family=family, raw_values=raw, resampled_rows=resampled)
