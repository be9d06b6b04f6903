"""Subset family -- each asset priced uniformly over its own K-subset of states."""

from __future__ import annotations

import numpy as np

from core.models.market import MarketParams, MeasureSet, SubsetUniform
from core.models.theory import CovCoefficient, Interpretation
from market.measures import sample_subset_measures
from theory.coefficients import cov_coefficient

PLUGIN_META = {
    "name": "subset",
    "display_name": "Subset-uniform measures",
    "description": "Uniform measure over a random subset of K = kappa * Omega states per asset",
    "category": "measure_family",
    "protocols": ["measure_family"],
    "class_name": "SubsetSampler",
    "free_parameters": ["kappa"],
    "config_fields": [
        {
            "key": "kappa",
            "label": "Subset fraction kappa",
            "type": "number",
            "required": False,
            "default": 0.5,
            "description": "K / Omega, in (0, 1]",
        },
        {
            "key": "bernoulli",
            "label": "Bernoulli inclusion",
            "type": "boolean",
            "required": False,
            "default": False,
            "description": "Include each state independently with probability kappa",
        },
    ],
}


class SubsetSampler:
    """Draws subset-uniform measures."""

    @property
    def name(self) -> str:
        return "subset"

    def sample(
        self,
        params: MarketParams,
        family: SubsetUniform,
        rng: np.random.Generator,
    ) -> MeasureSet:
        return sample_subset_measures(
            params,
            family.states(params.Omega),
            rng,
            bernoulli=family.bernoulli,
            family=family,
        )

    def cov_coefficient(
        self,
        family: SubsetUniform,
        Omega: float | str,
        interpretation: Interpretation = "direct",
    ) -> CovCoefficient:
        return cov_coefficient(family, Omega, interpretation)
