"""Replica-theory models -- covariance coefficients, saddle solutions, critical lines."""

from __future__ import annotations

import math
from typing import Literal

from pydantic import BaseModel, Field, field_validator

Interpretation = Literal["direct", "sqrt"]

SaddleBranch = Literal["negative_c", "positive_c", "degenerate_unity", "degenerate_zero"]


class CovCoefficient(BaseModel):
    """Omega times the off-diagonal covariance of the excess returns.

    ``c`` is always the coefficient itself (1/kappa - 2, delta/Omega**(alpha-2) - 1).
    ``interpretation`` decides what the saddle equations are fed:
    ``direct`` feeds c, ``sqrt`` feeds sign(c) * sqrt(|c|).
    """

    c: float
    interpretation: Interpretation = "direct"

    @field_validator("c")
    @classmethod
    def _psd(cls, value: float) -> float:
        if math.isnan(value):
            raise ValueError("Covariance coefficient is NaN")
        if value < -1.0 - 1e-12:
            raise ValueError(f"Covariance coefficient {value} < -1 (covariance not PSD)")
        return max(value, -1.0)

    @property
    def effective(self) -> float:
        """Value fed to the saddle-point equations."""
        if self.interpretation == "direct":
            return self.c
        return math.copysign(math.sqrt(abs(self.c)), self.c)


class SaddleSolution(BaseModel):
    """Joint root (xi, n_c) of one saddle-point system.

    ``s_scale`` is the saddle scale s; the critical condition leaves it free,
    so it is reported normalised to 1.
    """

    xi: float
    n_c: float
    s_scale: float = 1.0
    residual_norm: float = 0.0
    branch: SaddleBranch
    method: Literal["newton", "bisection", "analytic"] = "newton"
    iterations: int = 0
    coefficient: CovCoefficient


class CriticalLine(BaseModel):
    """Analytic critical line n_c(parameter) for one measure family."""

    family: dict
    param_name: str
    interpretation: Interpretation = "direct"
    points: list[tuple[float, float]] = Field(default_factory=list)
    # Finite Omega, "thermodynamic", or None when Omega follows N / n_c
    Omega_used: int | Literal["thermodynamic"] | None = "thermodynamic"
    N_used: int | None = None

    @property
    def params(self) -> list[float]:
        return [p for p, _ in self.points]

    @property
    def n_values(self) -> list[float]:
        return [n for _, n in self.points]


class SaddleOptions(BaseModel):
    """Numerical settings for the saddle-point solver."""

    tol: float = Field(default=1e-10, gt=0.0)
    max_iter: int = Field(default=100, gt=0)
    # Continuation steps from the c = 0 anchor to the target coefficient
    continuation_steps: int = Field(default=12, ge=1)
    fd_step: float = Field(default=1e-7, gt=0.0)
    min_damping: float = Field(default=1.0 / 1024, gt=0.0, le=1.0)
    # |c + 1| below this goes straight to the reduced one-dimensional solve
    unity_band: float = Field(default=1e-6, ge=0.0)
