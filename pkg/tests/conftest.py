"""Shared fixtures."""

from __future__ import annotations

import numpy as np
import pytest

from core.models.market import PerturbedUniform, SubsetUniform
from core.models.sweeps import PhaseGrid, SweepSpec
from main import build_registry
from simulator.engine import SweepEngine


@pytest.fixture
def registry():
    return build_registry()


@pytest.fixture
def engine(registry):
    return SweepEngine(registry)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def make_grid():
    """Build a PhaseGrid directly from a fraction matrix."""

    def _make(
        fraction: list[list[float]],
        n_grid: list[float],
        param_grid: list[float],
        family=None,
        param_name: str = "kappa",
        N: int = 100,
        realizations: int = 100,
    ) -> PhaseGrid:
        spec = SweepSpec(
            family=family or SubsetUniform(kappa=0.5),
            param_name=param_name,
            param_grid=param_grid,
            n_grid=n_grid,
            N=N,
            realizations=realizations,
        )
        zeros = [[0] * len(n_grid) for _ in param_grid]
        return PhaseGrid(
            spec=spec,
            fraction=fraction,
            marginal_count=zeros,
            undecided_count=[row[:] for row in zeros],
            omegas=spec.omegas(),
        )

    return _make


@pytest.fixture
def perturbed_family():
    return PerturbedUniform(delta=1.0, alpha=2.0)
