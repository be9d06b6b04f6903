"""Perturbed family -- uniform measure plus zero-sum Gaussian noise."""

from __future__ import annotations

import numpy as np

from core.models.market import MarketParams, MeasureSet, PerturbedUniform
from core.models.theory import CovCoefficient, Interpretation
from market.measures import sample_perturbed_measures
from theory.coefficients import cov_coefficient

PLUGIN_META = {
    "name": "perturbed",
    "display_name": "Perturbed-uniform measures",
    "description": "q = 1/Omega + noise with variance delta / Omega**alpha, optionally clipped",
    "category": "measure_family",
    "protocols": ["measure_family"],
    "class_name": "PerturbedSampler",
    "free_parameters": ["alpha", "delta"],
    "config_fields": [
        {
            "key": "delta",
            "label": "Noise amplitude delta",
            "type": "number",
            "required": True,
            "default": 1.0,
            "description": "Positive variance prefactor",
        },
        {
            "key": "alpha",
            "label": "Size exponent alpha",
            "type": "number",
            "required": False,
            "default": 2.0,
            "description": "Noise variance scales as Omega**-alpha",
        },
        {
            "key": "hard_constraint",
            "label": "Clip negative probabilities",
            "type": "boolean",
            "required": False,
            "default": False,
            "description": "Set negative q to zero and renormalise each row",
        },
    ],
}


class PerturbedSampler:
    """Draws perturbed-uniform measures."""

    @property
    def name(self) -> str:
        return "perturbed"

    def sample(
        self,
        params: MarketParams,
        family: PerturbedUniform,
        rng: np.random.Generator,
    ) -> MeasureSet:
        return sample_perturbed_measures(
            params,
            family.delta,
            family.alpha,
            family.hard_constraint,
            rng,
            family=family,
        )

    def cov_coefficient(
        self,
        family: PerturbedUniform,
        Omega: float | str,
        interpretation: Interpretation = "direct",
    ) -> CovCoefficient:
        return cov_coefficient(family, Omega, interpretation)
