"""Covariance coefficient c of the excess returns for each measure family.

c is Omega times the off-diagonal entry of the excess-return covariance,
normalised by the diagonal: 1/kappa - 2 for subset measures and
delta / Omega**(alpha - 2) - 1 for perturbed-uniform measures.
"""

from __future__ import annotations

import math
from typing import Literal

from core.models.market import PerturbedUniform, SubsetUniform
from core.models.theory import CovCoefficient, Interpretation

THERMODYNAMIC = "thermodynamic"

OmegaArg = float | Literal["thermodynamic"]


def _subset_value(family: SubsetUniform, Omega: OmegaArg) -> float:
    if Omega == THERMODYNAMIC:
        if family.kappa is None:
            raise ValueError("Subset family with an absolute K needs a finite Omega")
        kappa = family.kappa
    else:
        kappa = family.states(Omega) / Omega
    if not 0.0 < kappa <= 1.0:
        raise ValueError(f"kappa must lie in (0, 1], got {kappa}")
    return 1.0 / kappa - 2.0


def _perturbed_value(family: PerturbedUniform, Omega: OmegaArg) -> float:
    if not family.delta > 0.0:
        raise ValueError(f"delta must be positive, got {family.delta}")
    if Omega == THERMODYNAMIC:
        if family.alpha > 2.0:
            return -1.0
        if family.alpha == 2.0:
            return family.delta - 1.0
        # Noise outgrows the uniform part; the coefficient diverges.
        return math.inf
    return family.delta / Omega ** (family.alpha - 2.0) - 1.0


def cov_coefficient(
    family: SubsetUniform | PerturbedUniform,
    Omega: OmegaArg = THERMODYNAMIC,
    interpretation: Interpretation = "direct",
) -> CovCoefficient:
    """Coefficient for ``family`` at Omega states, or in the Omega -> inf limit.

    The result may be +inf (perturbed family with alpha < 2 in the limit);
    callers report that as n_c = 0.
    """
    if Omega != THERMODYNAMIC and not Omega >= 1:
        raise ValueError(f"Omega must be >= 1 or '{THERMODYNAMIC}', got {Omega!r}")
    if isinstance(family, SubsetUniform):
        value = _subset_value(family, Omega)
    elif isinstance(family, PerturbedUniform):
        value = _perturbed_value(family, Omega)
    else:
        raise ValueError(f"Unknown measure family: {family!r}")
    return CovCoefficient(c=value, interpretation=interpretation)
