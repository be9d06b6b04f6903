"""Sweep engine -- Monte Carlo phase diagrams over (parameter, n) grids.

Every realization draws from its own generator, seeded by
SeedSequence(master_seed, spawn_key=(param_index, n_index, realization)).
Cells share nothing, so a grid is identical whatever the worker count or
scheduling order.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from core.models.market import MarketParams, PerturbedUniform, SubsetUniform, with_parameter
from core.models.sweeps import CellResult, PhaseGrid, PnegCurve, SweepRun, SweepSpec, omega_for
from core.protocols import ArbitrageDetector, MeasureSampler
from core.registry import PluginRegistry
from detect.simplex import UndecidedError
from market.generator import expected_negative_fraction, make_rng, negative_fraction, sample_market

logger = logging.getLogger(__name__)


def realization_seed(master_seed: int, param_index: int, n_index: int, realization: int) -> np.random.SeedSequence:
    """Seed of one realization; depends only on its grid coordinates."""
    return np.random.SeedSequence(master_seed, spawn_key=(param_index, n_index, realization))


@dataclass(frozen=True)
class CellTask:
    """Everything a worker needs to evaluate one cell."""

    family: SubsetUniform | PerturbedUniform
    n: float
    N: int
    realizations: int
    master_seed: int
    param_index: int
    n_index: int
    sampler: MeasureSampler
    detector: ArbitrageDetector


def evaluate_cell(task: CellTask) -> CellResult:
    """Sample and classify the realizations of one cell.

    Undecided instances are counted and left out of the fraction. Any other
    failure is recorded on the result rather than raised.
    """
    Omega = omega_for(task.N, task.n)
    result = CellResult(param_index=task.param_index, n_index=task.n_index, Omega=Omega)
    try:
        params = MarketParams(N=task.N, Omega=Omega, seed=task.master_seed)
        for r in range(task.realizations):
            rng = make_rng(realization_seed(task.master_seed, task.param_index, task.n_index, r))
            instance = sample_market(params, task.family, task.sampler, rng)
            try:
                verdict = task.detector.detect(instance.excess_returns)
            except UndecidedError as exc:
                logger.warning(
                    "Undecided instance at cell (%d, %d) realization %d after %d pivots",
                    task.param_index, task.n_index, r, exc.pivots,
                )
                result.undecided += 1
                continue
            result.decided += 1
            result.infinite += int(verdict.is_infinite)
            result.marginal += int(verdict.marginal)
    except Exception as exc:
        logger.exception("Cell (%d, %d) failed", task.param_index, task.n_index)
        result.error = f"{type(exc).__name__}: {exc}"

    logger.debug(
        "Cell (%d, %d) n=%.4g Omega=%d: %d/%d infinite",
        task.param_index, task.n_index, task.n, Omega, result.infinite, result.decided,
    )
    return result


class SweepEngine:
    """Runs cells and grids with the samplers and detector from a registry.

    Usage:
        engine = SweepEngine(registry)
        grid = engine.run_grid(spec)
    """

    def __init__(self, registry: PluginRegistry, detector: str = "simplex") -> None:
        self._registry = registry
        self._detector: ArbitrageDetector = registry.get("detector", detector)

    def _sampler(self, family: SubsetUniform | PerturbedUniform) -> MeasureSampler:
        return self._registry.get("measure_family", family.kind)

    def run_cell(
        self,
        family: SubsetUniform | PerturbedUniform,
        n: float,
        N: int,
        R: int,
        master_seed: int,
        *,
        param_index: int = 0,
        n_index: int = 0,
    ) -> CellResult:
        """Fraction of infinite-volume instances at one (family, n) point."""
        if n <= 0:
            raise ValueError(f"Density n={n} must be positive")
        if R < 1:
            raise ValueError(f"Need at least one realization, got R={R}")
        if omega_for(N, n) < 1:
            raise ValueError(f"Density n={n} gives Omega < 1 for N={N}")
        task = CellTask(
            family=family,
            n=n,
            N=N,
            realizations=R,
            master_seed=master_seed,
            param_index=param_index,
            n_index=n_index,
            sampler=self._sampler(family),
            detector=self._detector,
        )
        return evaluate_cell(task)

    def _tasks(self, spec: SweepSpec) -> list[CellTask]:
        tasks = []
        for p_idx, value in enumerate(spec.param_grid):
            family = spec.family_at(value)
            sampler = self._sampler(family)
            for n_idx, n in enumerate(spec.n_grid):
                tasks.append(CellTask(
                    family=family,
                    n=n,
                    N=spec.N,
                    realizations=spec.realizations,
                    master_seed=spec.master_seed,
                    param_index=p_idx,
                    n_index=n_idx,
                    sampler=sampler,
                    detector=self._detector,
                ))
        return tasks

    def run_grid(self, spec: SweepSpec) -> PhaseGrid:
        """Evaluate every cell of the spec; failed cells are reported, never fatal."""
        tasks = self._tasks(spec)
        if spec.parallelism > 1:
            with ProcessPoolExecutor(max_workers=spec.parallelism) as pool:
                cells = list(pool.map(evaluate_cell, tasks))
        else:
            cells = [evaluate_cell(task) for task in tasks]

        rows, cols = len(spec.param_grid), len(spec.n_grid)
        fraction = [[0.0] * cols for _ in range(rows)]
        marginal = [[0] * cols for _ in range(rows)]
        undecided = [[0] * cols for _ in range(rows)]
        failures = []
        for cell in cells:
            fraction[cell.param_index][cell.n_index] = cell.fraction
            marginal[cell.param_index][cell.n_index] = cell.marginal
            undecided[cell.param_index][cell.n_index] = cell.undecided
            if cell.error:
                failures.append(
                    f"{spec.param_name}={spec.param_grid[cell.param_index]:g}, "
                    f"n={spec.n_grid[cell.n_index]:g}: {cell.error}"
                )

        total_marginal = sum(map(sum, marginal))
        if total_marginal:
            logger.warning("%d marginal LP instances in the grid", total_marginal)
        return PhaseGrid(
            spec=spec,
            fraction=fraction,
            marginal_count=marginal,
            undecided_count=undecided,
            omegas=spec.omegas(),
            failures=failures,
        )

    def run(self, spec: SweepSpec) -> SweepRun:
        """Run a grid wrapped in a SweepRun lifecycle record."""
        run = SweepRun.for_spec(spec)
        run.mark_started()
        logger.info(
            "Starting sweep %s: %d x %d cells, N=%d, R=%d, seed=%d, workers=%d",
            run.name, len(spec.param_grid), len(spec.n_grid), spec.N,
            spec.realizations, spec.master_seed, spec.parallelism,
        )
        try:
            grid = self.run_grid(spec)
        except Exception as exc:
            logger.exception("Sweep failed")
            run.mark_failed(str(exc))
            return run

        run.mark_completed(grid)
        logger.info(
            "Sweep complete: %s | %.1fs | %d failed cells",
            run.name, run.elapsed_seconds or 0.0, len(grid.failures),
        )
        return run

    def pneg_curve(
        self,
        family: PerturbedUniform,
        param_name: str,
        grid: list[float],
        n_grid: list[float],
        N: int,
        master_seed: int,
        realizations: int = 20,
    ) -> PnegCurve:
        """Fraction of negative raw measure entries for each (parameter, n)."""
        if not isinstance(family, PerturbedUniform):
            raise ValueError("Negative probabilities only arise in the perturbed family")
        sampler = self._sampler(family)
        empirical, analytic = [], []
        for p_idx, value in enumerate(grid):
            member = with_parameter(family, param_name, value)
            row, expected = [], []
            for n_idx, n in enumerate(n_grid):
                Omega = omega_for(N, n)
                if Omega < 1:
                    raise ValueError(f"Density n={n} gives Omega < 1 for N={N}")
                params = MarketParams(N=N, Omega=Omega, seed=master_seed)
                fractions = [
                    negative_fraction(sampler.sample(params, member, make_rng(realization_seed(master_seed, p_idx, n_idx, r))))
                    for r in range(realizations)
                ]
                row.append(float(np.mean(fractions)))
                expected.append(expected_negative_fraction(member.delta, member.alpha, Omega))
            empirical.append(row)
            analytic.append(expected)
            logger.debug("p_neg at %s=%g: %s", param_name, value, row)
        return PnegCurve(
            family=family.model_dump(),
            param_name=param_name,
            params=list(grid),
            n_grid=list(n_grid),
            N=N,
            realizations=realizations,
            master_seed=master_seed,
            empirical=empirical,
            analytic=analytic,
        )
