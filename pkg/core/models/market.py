"""Market models -- measure-family descriptors and sampled market instances.

Family descriptors are Pydantic models (they travel through configs, sweep
specs and JSON bundles). Sampled instances hold numpy arrays and are plain
dataclasses: they live on the hot path and are never serialized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Annotated, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class MarketParams(BaseModel):
    """Size and seed of one market: N assets, Omega world states."""

    model_config = ConfigDict(frozen=True)

    N: int = Field(ge=1)
    Omega: int = Field(ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)

    @property
    def density(self) -> float:
        """Asset density n = N / Omega."""
        return self.N / self.Omega


class SubsetUniform(BaseModel):
    """Each asset is priced uniformly over its own random subset of K states.

    Either ``K`` (absolute) or ``kappa`` (K / Omega) is given. With
    ``bernoulli`` each state is included independently with probability
    K / Omega and the row is normalised over the states actually drawn.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["subset"] = "subset"
    K: int | None = Field(default=None, ge=1)
    kappa: float | None = Field(default=None, gt=0.0, le=1.0)
    bernoulli: bool = False

    @model_validator(mode="after")
    def _one_size(self) -> SubsetUniform:
        if (self.K is None) == (self.kappa is None):
            raise ValueError("SubsetUniform needs exactly one of K or kappa")
        return self

    def states(self, Omega: int) -> int:
        """Subset size for a market with Omega states."""
        if self.K is not None:
            if self.K > Omega:
                raise ValueError(f"K={self.K} exceeds Omega={Omega}")
            return self.K
        return min(Omega, max(1, math.floor(self.kappa * Omega + 0.5)))

    def kappa_at(self, Omega: int) -> float:
        """Realised K / Omega for a market with Omega states."""
        return self.states(Omega) / Omega


class PerturbedUniform(BaseModel):
    """Uniform 1/Omega plus zero-sum Gaussian noise of variance delta / Omega**alpha."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["perturbed"] = "perturbed"
    delta: float = Field(gt=0.0)
    alpha: float = 2.0
    hard_constraint: bool = False


MeasureFamilySpec = Annotated[
    Union[SubsetUniform, PerturbedUniform],
    Field(discriminator="kind"),
]

# Parameters a sweep or a critical line may vary, per family kind.
FREE_PARAMETERS: dict[str, tuple[str, ...]] = {
    "subset": ("kappa",),
    "perturbed": ("alpha", "delta"),
}


def with_parameter(
    family: SubsetUniform | PerturbedUniform,
    name: str,
    value: float,
) -> SubsetUniform | PerturbedUniform:
    """Return a validated copy of ``family`` with one free parameter replaced."""
    allowed = FREE_PARAMETERS[family.kind]
    if name not in allowed:
        raise ValueError(
            f"'{name}' is not a free parameter of the {family.kind} family. "
            f"Must be one of: {list(allowed)}"
        )
    data = family.model_dump()
    data[name] = value
    if name == "kappa":
        data["K"] = None
    return type(family).model_validate(data)


# ---------------------------------------------------------------------------
# Sampled instances
# ---------------------------------------------------------------------------

@dataclass
class MeasureSet:
    """Local measures q_i^omega, one row per asset."""

    values: np.ndarray
    family: SubsetUniform | PerturbedUniform
    raw_values: np.ndarray | None = None
    resampled_rows: int = 0

    @property
    def raw(self) -> np.ndarray:
        """Pre-clipping values (the values themselves when nothing was clipped)."""
        return self.values if self.raw_values is None else self.raw_values


@dataclass
class MarketInstance:
    """One sampled market: payoffs, measures, prices and excess returns."""

    payoffs: np.ndarray
    measures: MeasureSet
    prices: np.ndarray
    excess_returns: np.ndarray

    @property
    def N(self) -> int:
        return self.payoffs.shape[0]

    @property
    def Omega(self) -> int:
        return self.payoffs.shape[1]
