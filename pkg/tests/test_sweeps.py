"""Sweep engine and grid metrics."""

import math

import numpy as np
import pytest

from core.models.market import PerturbedUniform, SubsetUniform
from core.models.sweeps import SweepSpec, TransitionLine, omega_for
from core.models.theory import CriticalLine
from core.models.verdicts import DetectorConfig
from core.registry import PluginRegistry
from detect.engine import SimplexDetector
from main import build_registry
from plugins.measures import PerturbedSampler
from simulator.engine import SweepEngine, realization_seed
from simulator.metrics import (
    analytic_line_for,
    calibrate_interpretations,
    compare_lines,
    extract_transition,
    monotonicity_violations,
    transition_width,
)


class BrokenSampler:
    """Subset sampler that always fails."""

    @property
    def name(self) -> str:
        return "subset"

    def sample(self, params, family, rng):
        raise RuntimeError("sampler exploded")

    def cov_coefficient(self, family, Omega, interpretation="direct"):
        raise NotImplementedError


class FlakySampler:
    """Perturbed sampler that fails after a few draws."""

    def __init__(self, fail_on: int) -> None:
        self._inner = PerturbedSampler()
        self._calls = 0
        self._fail_on = fail_on

    @property
    def name(self) -> str:
        return "perturbed"

    def sample(self, params, family, rng):
        self._calls += 1
        if self._calls == self._fail_on:
            raise RuntimeError("boom")
        return self._inner.sample(params, family, rng)

    def cov_coefficient(self, family, Omega, interpretation="direct"):
        return self._inner.cov_coefficient(family, Omega, interpretation)


def test_omega_rounds_half_up():
    assert omega_for(100, 0.5) == 200
    assert omega_for(5, 2.0) == 3
    assert omega_for(10, 0.3) == 33


def test_realization_seeds_are_independent_of_order():
    a = np.random.default_rng(realization_seed(7, 1, 2, 3)).random()
    b = np.random.default_rng(realization_seed(7, 1, 2, 3)).random()
    c = np.random.default_rng(realization_seed(7, 2, 1, 3)).random()
    assert a == b != c


@pytest.mark.parametrize(
    "family",
    [SubsetUniform(kappa=0.5), PerturbedUniform(delta=1.0, alpha=2.0)],
)
def test_cell_with_fewer_states_than_assets_is_always_arbitrage(engine, family):
    cell = engine.run_cell(family, 1.2, 20, 20, master_seed=1)
    assert cell.fraction == 1.0
    assert cell.decided == 20 and cell.undecided == 0 and cell.error is None


def test_full_subset_never_has_arbitrage(engine):
    # Every asset prices with the global uniform measure, so the state vectors sum to zero.
    for n in (0.8, 1.2):
        cell = engine.run_cell(SubsetUniform(kappa=1.0), n, 60, 20, master_seed=2)
        assert cell.fraction == 0.0


def test_half_subset_changes_phase_around_one_half(engine):
    low = engine.run_cell(SubsetUniform(kappa=0.5), 0.25, 60, 30, master_seed=3)
    high = engine.run_cell(SubsetUniform(kappa=0.5), 0.75, 60, 30, master_seed=3)
    assert low.fraction <= 0.15
    assert high.fraction >= 0.85


def test_run_cell_rejects_bad_arguments(engine):
    with pytest.raises(ValueError):
        engine.run_cell(SubsetUniform(kappa=0.5), 0.0, 10, 5, master_seed=0)
    with pytest.raises(ValueError):
        engine.run_cell(SubsetUniform(kappa=0.5), 0.5, 10, 0, master_seed=0)


def test_single_cell_grid_matches_run_cell(engine):
    spec = SweepSpec(
        family=SubsetUniform(kappa=0.5), param_name="kappa", param_grid=[0.3],
        n_grid=[0.6], N=12, realizations=15, master_seed=4,
    )
    grid = engine.run_grid(spec)
    cell = engine.run_cell(SubsetUniform(kappa=0.3), 0.6, 12, 15, master_seed=4)
    assert grid.shape == (1, 1)
    assert grid.fraction[0][0] == cell.fraction
    assert grid.omegas == [20]


def test_grid_is_identical_across_worker_counts(engine):
    kwargs = dict(
        family=PerturbedUniform(delta=1.0, alpha=2.0), param_name="delta",
        param_grid=[0.5, 1.5], n_grid=[0.4, 0.7, 1.0], N=8, realizations=5, master_seed=5,
    )
    serial = engine.run_grid(SweepSpec(**kwargs, parallelism=1))
    parallel = engine.run_grid(SweepSpec(**kwargs, parallelism=2))
    assert serial.fraction == parallel.fraction
    assert serial.marginal_count == parallel.marginal_count
    assert serial.undecided_count == parallel.undecided_count
    assert serial.spec.fingerprint() == parallel.spec.fingerprint()


def test_cells_at_or_above_unit_density_report_one(engine):
    spec = SweepSpec(
        family=PerturbedUniform(delta=1.0, alpha=2.0), param_name="delta",
        param_grid=[1.0], n_grid=[1.0, 1.25], N=16, realizations=10,
    )
    assert engine.run_grid(spec).fraction == [[1.0, 1.0]]


def test_failed_cells_are_recorded():
    registry = build_registry()
    registry.register("measure_family", BrokenSampler())
    spec = SweepSpec(
        family=SubsetUniform(kappa=0.5), param_name="kappa",
        param_grid=[0.5], n_grid=[0.5, 1.0], N=6, realizations=2,
    )
    grid = SweepEngine(registry).run_grid(spec)
    assert len(grid.failures) == 2
    assert "sampler exploded" in grid.failures[0]
    assert all(math.isnan(f) for f in grid.fraction[0])


def test_cell_failing_partway_reports_nan():
    registry = build_registry()
    registry.register("measure_family", FlakySampler(fail_on=4))
    spec = SweepSpec(
        family=PerturbedUniform(delta=1.0, alpha=2.0), param_name="delta",
        param_grid=[1.0], n_grid=[1.2], N=20, realizations=20,
    )
    grid = SweepEngine(registry).run_grid(spec)
    assert grid.failures == ["delta=1, n=1.2: RuntimeError: boom"]
    assert math.isnan(grid.fraction[0][0])


def test_undecided_instances_are_excluded():
    registry = PluginRegistry()
    base = build_registry()
    registry.register("measure_family", base.get("measure_family", "subset"))
    registry.register("detector", SimplexDetector(DetectorConfig(max_pivots=1)))
    cell = SweepEngine(registry).run_cell(SubsetUniform(kappa=0.5), 0.5, 20, 3, master_seed=0)
    assert cell.undecided == 3 and cell.decided == 0
    assert math.isnan(cell.fraction)


def test_sweep_run_lifecycle(engine):
    spec = SweepSpec(
        family=SubsetUniform(kappa=0.5), param_name="kappa",
        param_grid=[0.5], n_grid=[1.0], N=6, realizations=3,
    )
    run = engine.run(spec)
    assert run.status == "completed"
    assert run.id == f"sweep_{spec.fingerprint()}"
    assert run.grid is not None and run.elapsed_seconds >= 0.0


def test_pneg_curve_tracks_normal_tail(engine):
    curve = engine.pneg_curve(
        PerturbedUniform(delta=1.0, alpha=2.0), "alpha", [2.0, 3.0], [0.5], N=100, master_seed=6,
    )
    assert curve.empirical[0][0] == pytest.approx(curve.analytic[0][0], abs=0.02)
    assert curve.analytic[0][0] == pytest.approx(0.158, abs=0.005)
    assert curve.empirical[1][0] < 1e-3 and curve.analytic[1][0] < 1e-3
    with pytest.raises(ValueError):
        engine.pneg_curve(SubsetUniform(kappa=0.5), "kappa", [0.5], [0.5], N=10, master_seed=0)


# ---------------------------------------------------------------------------
# Metrics on hand-built grids
# ---------------------------------------------------------------------------


def test_transition_interpolates_crossing(make_grid):
    grid = make_grid([[0.0, 0.0, 1.0, 1.0]], [0.2, 0.4, 0.6, 0.8], [0.5])
    line = extract_transition(grid)
    assert line.points == [(0.5, pytest.approx(0.5))]
    assert line.censored == []


def test_rows_without_crossing_are_censored(make_grid):
    grid = make_grid([[1.0, 1.0], [0.0, 0.0]], [0.4, 0.6], [0.3, 0.6])
    line = extract_transition(grid)
    assert line.points == []
    assert line.censored == [(0.3, "below"), (0.6, "above")]


def test_compare_identical_lines():
    points = [(0.25, 0.33), (0.5, 0.5), (1.0, 1.0)]
    empirical = TransitionLine(param_name="kappa", points=points)
    analytic = CriticalLine(family={}, param_name="kappa", points=points)
    comparison = compare_lines(empirical, analytic)
    assert comparison.max_abs_dev == 0.0 and comparison.mean_abs_dev == 0.0
    assert len(comparison.rows) == 3


def test_compare_interpolates_analytic_line():
    empirical = TransitionLine(param_name="kappa", points=[(0.5, 0.6), (2.0, 0.1)])
    analytic = CriticalLine(family={}, param_name="kappa", points=[(0.0, 0.0), (1.0, 1.0)])
    comparison = compare_lines(empirical, analytic)
    assert len(comparison.rows) == 1
    assert comparison.max_abs_dev == pytest.approx(0.1)


def test_compare_without_overlap_fails():
    empirical = TransitionLine(param_name="kappa", points=[(0.9, 0.5)])
    analytic = CriticalLine(family={}, param_name="kappa", points=[(0.1, 0.2), (0.2, 0.3)])
    with pytest.raises(ValueError):
        compare_lines(empirical, analytic)
    with pytest.raises(ValueError):
        compare_lines(TransitionLine(param_name="kappa"), analytic)


def test_monotonicity_violations(make_grid):
    grid = make_grid([[0.0, 0.5, 0.2, 1.0], [0.0, 0.5, 0.45, 1.0]], [0.2, 0.4, 0.6, 0.8], [0.3, 0.6])
    violations = monotonicity_violations(grid)
    assert len(violations) == 1
    assert violations[0].param == 0.3
    assert violations[0].drop == pytest.approx(0.3)


def test_transition_width(make_grid):
    grid = make_grid([[0.0, 0.1, 0.5, 0.9, 1.0], [0.0, 0.0, 0.0, 0.0, 0.2]], [0.1, 0.2, 0.3, 0.4, 0.5], [0.3, 0.6])
    widths = transition_width(grid)
    assert widths[0] == pytest.approx(0.2)
    assert widths[1] is None
    with pytest.raises(ValueError):
        transition_width(grid, lo=0.9, hi=0.1)


def test_analytic_line_matches_family(make_grid):
    subset = make_grid([[0.0, 1.0]], [0.4, 0.6], [0.5])
    assert analytic_line_for(subset).Omega_used == "thermodynamic"
    perturbed = make_grid(
        [[0.0, 1.0]], [0.4, 0.6], [1.0],
        family=PerturbedUniform(delta=1.0, alpha=2.0), param_name="delta", N=200,
    )
    line = analytic_line_for(perturbed)
    assert line.N_used == 200
    assert line.n_values[0] == pytest.approx(0.5, abs=1e-9)


def test_calibration_compares_both_interpretations(make_grid):
    grid = make_grid(
        [[0.0, 0.0, 1.0, 1.0], [0.0, 0.0, 1.0, 1.0], [0.0, 0.0, 0.0, 1.0]],
        [0.2, 0.4, 0.6, 0.8],
        [0.25, 0.5, 1.0],
    )
    report = calibrate_interpretations(grid)
    assert set(report.comparisons) == {"direct", "sqrt"}
    assert report.preferred in report.comparisons
    assert len(report.empirical.points) == 3
