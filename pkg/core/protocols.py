"""Core protocols -- the extension points of the system.

The core imports these protocols. Plugins implement them.
The core NEVER imports concrete implementations.

All protocols use Python's structural subtyping (typing.Protocol):
if your class has the right methods, it implements the protocol.
No inheritance required.
"""

from __future__ import annotations

from typing import Protocol, runtime_checkable

import numpy as np

from core.models.market import MarketParams, MeasureSet, PerturbedUniform, SubsetUniform
from core.models.theory import CovCoefficient, Interpretation
from core.models.verdicts import ArbitrageVerdict


# ---------------------------------------------------------------------------
# 1. MeasureSampler -- draws the local measures q_i for one market
# ---------------------------------------------------------------------------

@runtime_checkable
class MeasureSampler(Protocol):
    """Draws an N x Omega set of local measures for one measure family.

    One sampler per family kind ("subset", "perturbed"). Samplers must be
    pure given the generator and picklable (sweeps ship them to workers).
    """

    @property
    def name(self) -> str:
        """Family kind this sampler handles, e.g. 'subset'."""
        ...

    def sample(
        self,
        params: MarketParams,
        family: SubsetUniform | PerturbedUniform,
        rng: np.random.Generator,
    ) -> MeasureSet:
        """Draw one measure set for the given market size."""
        ...

    def cov_coefficient(
        self,
        family: SubsetUniform | PerturbedUniform,
        Omega: float | str,
        interpretation: Interpretation = "direct",
    ) -> CovCoefficient:
        """Excess-return covariance coefficient at Omega states (or "thermodynamic")."""
        ...


# ---------------------------------------------------------------------------
# 2. ArbitrageDetector -- zero vs infinite arbitrage volume
# ---------------------------------------------------------------------------

@runtime_checkable
class ArbitrageDetector(Protocol):
    """Decides whether the arbitrage cone of an N x Omega return matrix has
    nonzero (hence infinite) volume.

    Default implementation: the simplex detector. The hull oracle is an
    independent cross-check for small instances.
    """

    @property
    def name(self) -> str:
        ...

    def detect(self, returns: np.ndarray) -> ArbitrageVerdict:
        """Return the verdict for one matrix y_i^omega (assets x states)."""
        ...
