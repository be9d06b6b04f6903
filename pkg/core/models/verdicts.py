"""Arbitrage verdict models -- detector settings and per-instance outcomes."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field


class DetectorConfig(BaseModel):
    """Settings for the strict-feasibility detector."""

    tol: float = Field(default=1e-9, gt=0.0)
    max_pivots: int = Field(default=50_000, gt=0)
    # "dantzig" means Dantzig pricing with a Bland fallback once pivots stall
    pivot_rule: Literal["bland", "dantzig"] = "dantzig"
    stall_limit: int = Field(default=50, gt=0)
    refactor_every: int = Field(default=64, gt=0)
    # Instances with tol / factor < t* < factor * tol are flagged
    marginal_factor: float = Field(default=10.0, ge=1.0)


class ArbitrageVerdict(BaseModel):
    """Zero-volume vs infinite-volume outcome for one matrix of excess returns.

    ``witness`` is present iff the volume is infinite; ``margin`` is the
    achieved min over states of sum_i z_i y_i^omega for that witness.
    """

    kind: Literal["zero_volume", "infinite_volume"]
    witness: list[float] | None = None
    margin: float = 0.0
    t_star: float = 0.0
    pivots: int = 0
    marginal: bool = False
    detector: str = "simplex"

    @property
    def is_infinite(self) -> bool:
        return self.kind == "infinite_volume"

    @property
    def label(self) -> str:
        return "InfiniteVolume" if self.is_infinite else "ZeroVolume"
