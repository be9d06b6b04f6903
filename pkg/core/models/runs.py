"""Run requests -- validated payloads for each CLI subcommand.

Every request rejects unknown keys and is echoed (with the resolved seed)
before anything runs, so a printed RunConfig is enough to repeat a run.
"""

from __future__ import annotations

from pathlib import Path
from typing import Literal, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from core.models.market import FREE_PARAMETERS, MeasureFamilySpec
from core.models.sweeps import SweepSpec
from core.models.theory import Interpretation


class SimulateRequest(BaseModel):
    """One market instance."""

    model_config = ConfigDict(extra="forbid")

    family: MeasureFamilySpec
    N: int = Field(ge=1)
    Omega: int = Field(ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)
    detector: str = "simplex"


class CriticalLineRequest(BaseModel):
    """Analytic critical line over one free parameter.

    With ``N`` set the line is the finite-size one at N assets; otherwise
    ``Omega`` is a fixed state count or "thermodynamic".
    """

    model_config = ConfigDict(extra="forbid")

    family: MeasureFamilySpec
    param_name: str
    grid: list[float]
    Omega: int | Literal["thermodynamic"] = "thermodynamic"
    N: int | None = Field(default=None, ge=1)
    interpretation: Interpretation = "direct"

    @model_validator(mode="after")
    def _free_parameter(self) -> CriticalLineRequest:
        if self.param_name not in FREE_PARAMETERS[self.family.kind]:
            raise ValueError(f"'{self.param_name}' is not a free parameter of the {self.family.kind} family")
        return self


class CompareRequest(BaseModel):
    """Sweep a grid, extract its transition and compare with theory."""

    model_config = ConfigDict(extra="forbid")

    sweep: SweepSpec
    level: float = Field(default=0.5, gt=0.0, lt=1.0)
    interpretation: Interpretation = "direct"


class PnegRequest(BaseModel):
    """Negative-probability fraction over one perturbed-family parameter."""

    model_config = ConfigDict(extra="forbid")

    family: MeasureFamilySpec
    param_name: str
    grid: list[float]
    n_grid: list[float]
    N: int = Field(ge=1)
    realizations: int = Field(default=20, ge=1)
    master_seed: int = Field(default=0, ge=0, lt=2**64)

    @model_validator(mode="after")
    def _perturbed_only(self) -> PnegRequest:
        if self.family.kind != "perturbed":
            raise ValueError("pneg needs the perturbed family")
        if self.param_name not in FREE_PARAMETERS["perturbed"]:
            raise ValueError(f"'{self.param_name}' is not a free parameter of the perturbed family")
        return self


RunPayload = Union[SimulateRequest, SweepSpec, CriticalLineRequest, CompareRequest, PnegRequest]


class RunConfig(BaseModel):
    """A fully resolved CLI run."""

    model_config = ConfigDict(extra="forbid")

    command: Literal["simulate", "phase-diagram", "critical-line", "compare", "pneg", "calibrate"]
    payload: RunPayload
    output_dir: Path
    formats: list[Literal["csv", "json", "svg"]] = Field(default_factory=lambda: ["csv", "json", "svg"])
