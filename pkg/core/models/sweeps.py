"""Sweep models -- phase-diagram specs, grids, transition lines and run records."""

from __future__ import annotations

import hashlib
import math
from datetime import datetime, timezone
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from core.models.market import FREE_PARAMETERS, MeasureFamilySpec, with_parameter


def omega_for(N: int, n: float) -> int:
    """Number of states for N assets at density n (nearest integer, halves up)."""
    return math.floor(N / n + 0.5)


class SweepSpec(BaseModel):
    """A Monte Carlo phase-diagram sweep over (parameter, n)."""

    model_config = ConfigDict(extra="forbid")

    family: MeasureFamilySpec
    param_name: str
    param_grid: list[float]
    n_grid: list[float]
    N: int = Field(ge=2)
    realizations: int = Field(default=100, ge=1)
    master_seed: int = Field(default=0, ge=0, lt=2**64)
    parallelism: int = Field(default=1, ge=1)

    @field_validator("param_grid", "n_grid")
    @classmethod
    def _increasing(cls, grid: list[float]) -> list[float]:
        if not grid:
            raise ValueError("Grid must be non-empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("Grid must be strictly increasing")
        return grid

    @model_validator(mode="after")
    def _consistent(self) -> SweepSpec:
        allowed = FREE_PARAMETERS[self.family.kind]
        if self.param_name not in allowed:
            raise ValueError(
                f"'{self.param_name}' is not a free parameter of the {self.family.kind} family"
            )
        for n in self.n_grid:
            if n <= 0:
                raise ValueError(f"Density n={n} must be positive")
            if omega_for(self.N, n) < 1:
                raise ValueError(f"Density n={n} gives Omega < 1 for N={self.N}")
        return self

    def family_at(self, value: float):
        return with_parameter(self.family, self.param_name, value)

    def omegas(self) -> list[int]:
        return [omega_for(self.N, n) for n in self.n_grid]

    def fingerprint(self) -> str:
        """Stable short hash of the spec (parallelism excluded: it never changes results)."""
        payload = self.model_dump_json(exclude={"parallelism"})
        return hashlib.sha256(payload.encode()).hexdigest()[:12]


class CellResult(BaseModel):
    """Outcome of one (parameter, n) cell."""

    param_index: int
    n_index: int
    Omega: int
    infinite: int = 0
    decided: int = 0
    undecided: int = 0
    marginal: int = 0
    error: str | None = None

    @property
    def fraction(self) -> float:
        if self.error or not self.decided:
            return math.nan
        return self.infinite / self.decided


class PhaseGrid(BaseModel):
    """Fraction of infinite-volume instances on a |param_grid| x |n_grid| grid."""

    model_config = ConfigDict(ser_json_inf_nan="constants")

    spec: SweepSpec
    fraction: list[list[float]]
    marginal_count: list[list[int]]
    undecided_count: list[list[int]]
    omegas: list[int]
    cell_seeds: str = "SeedSequence(master_seed, spawn_key=(param_index, n_index, realization))"
    failures: list[str] = Field(default_factory=list)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.spec.param_grid), len(self.spec.n_grid)


class TransitionLine(BaseModel):
    """Empirical transition: where each parameter row crosses ``level``."""

    param_name: str
    level: float = 0.5
    method: Literal["linear"] = "linear"
    points: list[tuple[float, float]] = Field(default_factory=list)
    # Rows that never cross: (param, "below" | "above") relative to the n grid
    censored: list[tuple[float, str]] = Field(default_factory=list)


class DeviationRow(BaseModel):
    param: float
    empirical_n: float
    analytic_n: float
    abs_dev: float


class LineComparison(BaseModel):
    """Empirical vs analytic transition line on the empirical parameter values."""

    interpretation: str = "direct"
    max_abs_dev: float
    mean_abs_dev: float
    rows: list[DeviationRow] = Field(default_factory=list)


class SweepRun(BaseModel):
    """A record of one phase-diagram sweep (lifecycle + result)."""

    id: str
    name: str
    spec: SweepSpec
    status: Literal["pending", "running", "completed", "failed"] = "pending"

    started_at: datetime | None = None
    completed_at: datetime | None = None
    elapsed_seconds: float | None = None
    grid: PhaseGrid | None = None
    error: str | None = None

    @classmethod
    def for_spec(cls, spec: SweepSpec) -> SweepRun:
        return cls(
            id=f"sweep_{spec.fingerprint()}",
            name=f"{spec.family.kind}_{spec.param_name}_N{spec.N}_R{spec.realizations}",
            spec=spec,
        )

    def mark_started(self) -> None:
        self.status = "running"
        self.started_at = datetime.now(timezone.utc)

    def mark_completed(self, grid: PhaseGrid) -> None:
        self.status = "completed"
        self.completed_at = datetime.now(timezone.utc)
        self.grid = grid
        if self.started_at:
            self.elapsed_seconds = (self.completed_at - self.started_at).total_seconds()

    def mark_failed(self, error: str) -> None:
        self.status = "failed"
        self.completed_at = datetime.now(timezone.utc)
        self.error = error
        if self.started_at:
            self.elapsed_seconds = (self.completed_at - self.started_at).total_seconds()


class MonotonicityViolation(BaseModel):
    """A drop in fraction between adjacent n cells beyond the sampling allowance."""

    param: float
    n_from: float
    n_to: float
    drop: float
    allowance: float


class CalibrationReport(BaseModel):
    """Both covariance interpretations compared against one empirical line."""

    empirical: TransitionLine
    comparisons: dict[str, LineComparison]
    preferred: str


class PnegCurve(BaseModel):
    """Fraction of negative raw measure entries per (parameter, n)."""

    family: dict
    param_name: str
    params: list[float]
    n_grid: list[float]
    N: int
    realizations: int
    master_seed: int
    empirical: list[list[float]]
    analytic: list[list[float]]
