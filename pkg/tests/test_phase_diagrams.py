"""Desk-scale phase diagrams (slow; run with -m slow)."""

import numpy as np
import pytest

from core.models.market import PerturbedUniform, SubsetUniform
from core.models.sweeps import SweepSpec
from simulator.metrics import calibrate_interpretations, monotonicity_violations, transition_width

pytestmark = pytest.mark.slow


def test_half_subset_far_from_transition(engine):
    low = engine.run_cell(SubsetUniform(kappa=0.5), 0.3, 100, 100, master_seed=11)
    high = engine.run_cell(SubsetUniform(kappa=0.5), 0.7, 100, 100, master_seed=11)
    assert low.fraction <= 0.05
    assert high.fraction >= 0.95


def test_subset_diagram_matches_direct_line(engine):
    spec = SweepSpec(
        family=SubsetUniform(kappa=0.5),
        param_name="kappa",
        param_grid=[round(0.05 * k, 12) for k in range(2, 21)],
        n_grid=[round(0.05 * k, 12) for k in range(1, 23)],
        N=100,
        realizations=100,
        master_seed=7,
        parallelism=4,
    )
    grid = engine.run_grid(spec)
    assert grid.failures == []
    report = calibrate_interpretations(grid)
    direct = [row for row in report.comparisons["direct"].rows if row.param >= 0.2]
    assert max(row.abs_dev for row in direct) <= 0.1
    assert dict(report.empirical.points)[0.5] == pytest.approx(0.5, abs=0.07)
    assert report.preferred == "direct"

    # The two analytic lines are 0.103 apart at kappa = 0.1; only direct sits on the data.
    by_param = {
        name: {row.param: row for row in comparison.rows}
        for name, comparison in report.comparisons.items()
    }
    assert by_param["direct"][0.1].analytic_n == pytest.approx(0.194, abs=0.002)
    assert by_param["sqrt"][0.1].analytic_n == pytest.approx(0.297, abs=0.002)
    assert by_param["sqrt"][0.1].abs_dev > 0.05
    assert by_param["sqrt"][0.1].abs_dev > by_param["direct"][0.1].abs_dev
    assert report.comparisons["sqrt"].mean_abs_dev > report.comparisons["direct"].mean_abs_dev


def test_cells_above_unit_density_are_certain(engine):
    spec = SweepSpec(
        family=PerturbedUniform(delta=1.0, alpha=2.0),
        param_name="delta",
        param_grid=[0.5, 0.75, 1.0, 1.25, 1.5],
        n_grid=[1.0, 1.125, 1.25, 1.375, 1.5],
        N=64,
        realizations=50,
        master_seed=12,
        parallelism=4,
    )
    grid = engine.run_grid(spec)
    assert all(f == 1.0 for row in grid.fraction for f in row)


def test_fraction_is_monotone_in_density(engine):
    spec = SweepSpec(
        family=SubsetUniform(kappa=0.5),
        param_name="kappa",
        param_grid=[round(0.05 * k, 12) for k in range(1, 21)],
        n_grid=[round(0.05 * k, 12) for k in range(1, 21)],
        N=64,
        realizations=50,
        master_seed=8,
        parallelism=4,
    )
    assert len(monotonicity_violations(engine.run_grid(spec))) <= 3


def test_transition_sharpens_with_size(engine):
    def mean_width(N):
        spec = SweepSpec(
            family=SubsetUniform(kappa=0.5),
            param_name="kappa",
            param_grid=[0.5],
            n_grid=[round(0.05 * k, 12) for k in range(2, 21)],
            N=N,
            realizations=60,
            master_seed=9,
            parallelism=4,
        )
        widths = [w for w in transition_width(engine.run_grid(spec)) if w is not None]
        return float(np.mean(widths))

    assert mean_width(128) < mean_width(32)


def test_perturbed_alpha_diagram_crosses_half_near_two(engine):
    spec = SweepSpec(
        family=PerturbedUniform(delta=1.0, alpha=2.0),
        param_name="alpha",
        param_grid=[1.75, 2.0, 2.25],
        n_grid=[round(0.1 * k, 12) for k in range(1, 11)],
        N=100,
        realizations=60,
        master_seed=10,
        parallelism=4,
    )
    report = calibrate_interpretations(engine.run_grid(spec))
    assert report.comparisons["direct"].max_abs_dev <= 0.1
