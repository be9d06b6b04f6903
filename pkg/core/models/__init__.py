"""Pydantic data models shared across all components."""

from core.models.market import (
    MarketInstance,
    MarketParams,
    MeasureFamilySpec,
    MeasureSet,
    PerturbedUniform,
    SubsetUniform,
    with_parameter,
)
from core.models.verdicts import ArbitrageVerdict, DetectorConfig
from core.models.theory import CovCoefficient, CriticalLine, SaddleOptions, SaddleSolution
from core.models.runs import (
    CompareRequest,
    CriticalLineRequest,
    PnegRequest,
    RunConfig,
    SimulateRequest,
)
from core.models.sweeps import (
    CalibrationReport,
    CellResult,
    DeviationRow,
    LineComparison,
    MonotonicityViolation,
    PhaseGrid,
    PnegCurve,
    SweepRun,
    SweepSpec,
    TransitionLine,
)

__all__ = [
    "CompareRequest",
    "CriticalLineRequest",
    "PnegRequest",
    "RunConfig",
    "SimulateRequest",
    "MarketInstance",
    "MarketParams",
    "MeasureFamilySpec",
    "MeasureSet",
    "PerturbedUniform",
    "SubsetUniform",
    "with_parameter",
    "ArbitrageVerdict",
    "DetectorConfig",
    "CovCoefficient",
    "CriticalLine",
    "SaddleOptions",
    "SaddleSolution",
    "CalibrationReport",
    "CellResult",
    "DeviationRow",
    "LineComparison",
    "MonotonicityViolation",
    "PhaseGrid",
    "PnegCurve",
    "SweepRun",
    "SweepSpec",
    "TransitionLine",
]
