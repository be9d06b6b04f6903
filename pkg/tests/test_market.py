"""Market generation: payoffs, measures, prices and excess returns."""

import numpy as np
import pytest
from pydantic import ValidationError
from scipy.special import ndtr

from core.models.market import MarketParams, PerturbedUniform, SubsetUniform, with_parameter
from market.generator import (
    compute_excess_returns,
    compute_prices,
    expected_negative_fraction,
    make_rng,
    negative_fraction,
    sample_market,
    sample_payoffs,
)
from market.measures import sample_perturbed_measures, sample_subset_measures
from plugins.measures import PerturbedSampler, SubsetSampler


def test_payoffs_identical_for_identical_seed():
    params = MarketParams(N=2, Omega=3, seed=11)
    first = sample_payoffs(params, make_rng(params.seed))
    second = sample_payoffs(params, make_rng(params.seed))
    np.testing.assert_array_equal(first, second)
    assert first.shape == (2, 3)


def test_payoffs_are_standard_normal():
    payoffs = sample_payoffs(MarketParams(N=1000, Omega=1000), make_rng(5))
    assert abs(payoffs.mean()) < 4 / np.sqrt(payoffs.size)
    assert abs(payoffs.var() - 1.0) < 0.05


def test_market_params_reject_empty_market():
    with pytest.raises(ValidationError):
        MarketParams(N=0, Omega=3)
    with pytest.raises(ValidationError):
        MarketParams(N=3, Omega=0)


@pytest.mark.parametrize("K", [1, 3, 7, 10])
def test_subset_rows_have_exactly_k_equal_entries(K):
    measures = sample_subset_measures(MarketParams(N=20, Omega=10), K, make_rng(1))
    values = measures.values
    np.testing.assert_allclose(values.sum(axis=1), 1.0, atol=1e-12)
    assert ((values > 0).sum(axis=1) == K).all()
    np.testing.assert_array_equal(values[values > 0], 1.0 / K)


def test_subset_full_set_is_global_uniform():
    measures = sample_subset_measures(MarketParams(N=4, Omega=6), 6, make_rng(2))
    np.testing.assert_array_equal(measures.values, np.full((4, 6), 1.0 / 6))


@pytest.mark.parametrize("K", [0, 11])
def test_subset_size_out_of_range(K):
    with pytest.raises(ValueError):
        sample_subset_measures(MarketParams(N=2, Omega=10), K, make_rng(0))


def test_subset_moments():
    Omega, K = 20, 10
    values = sample_subset_measures(MarketParams(N=2000, Omega=Omega), K, make_rng(3)).values
    assert values.mean() == pytest.approx(1.0 / Omega, rel=1e-12)
    assert (values**2).mean() == pytest.approx(1.0 / (K * Omega), rel=1e-12)


def test_bernoulli_subsets_renormalise_and_redraw_empty_rows():
    measures = sample_subset_measures(MarketParams(N=200, Omega=5), 1, make_rng(4), bernoulli=True)
    values = measures.values
    np.testing.assert_allclose(values.sum(axis=1), 1.0, atol=1e-12)
    assert (values >= 0).all()
    assert ((values > 0).sum(axis=1) >= 1).all()
    assert measures.resampled_rows > 0


def test_subset_kappa_resolution():
    assert SubsetUniform(kappa=0.25).states(10) == 3
    assert SubsetUniform(kappa=0.01).states(10) == 1
    assert SubsetUniform(kappa=1.0).states(7) == 7
    with pytest.raises(ValueError):
        SubsetUniform(K=5).states(4)
    with pytest.raises(ValidationError):
        SubsetUniform(K=2, kappa=0.5)
    with pytest.raises(ValidationError):
        SubsetUniform()


def test_with_parameter_replaces_and_validates():
    family = with_parameter(SubsetUniform(K=3), "kappa", 0.4)
    assert family.kappa == 0.4 and family.K is None
    assert with_parameter(PerturbedUniform(delta=1.0), "alpha", 2.5).alpha == 2.5
    with pytest.raises(ValueError):
        with_parameter(SubsetUniform(kappa=0.5), "alpha", 2.0)
    with pytest.raises(ValidationError):
        with_parameter(PerturbedUniform(delta=1.0), "delta", -1.0)


def test_perturbed_vanishing_noise_is_uniform():
    params = MarketParams(N=5, Omega=8)
    values = sample_perturbed_measures(params, 1e-30, 2.0, False, make_rng(0)).values
    np.testing.assert_allclose(values, 1.0 / 8, atol=1e-14)


def test_perturbed_noise_variance_after_projection():
    Omega = 50
    values = sample_perturbed_measures(MarketParams(N=4000, Omega=Omega), 1.0, 2.0, False, make_rng(6)).values
    expected = (1.0 / Omega**2) * (1 - 1 / Omega)
    assert (values - 1.0 / Omega).var() == pytest.approx(expected, rel=0.03)
    np.testing.assert_allclose(values.sum(axis=1), 1.0, atol=1e-12)


def test_perturbed_hard_constraint_clips_and_keeps_raw():
    measures = sample_perturbed_measures(MarketParams(N=200, Omega=30), 2.0, 2.0, True, make_rng(7))
    assert (measures.values >= 0).all()
    np.testing.assert_allclose(measures.values.sum(axis=1), 1.0, atol=1e-12)
    assert measures.raw_values is not None
    assert (measures.raw_values < 0).any()
    assert negative_fraction(measures) > 0.1


def test_perturbed_rejects_nonpositive_delta():
    with pytest.raises(ValueError):
        sample_perturbed_measures(MarketParams(N=2, Omega=3), 0.0, 2.0, False, make_rng(0))


def test_negative_fraction_subset_is_zero():
    measures = sample_subset_measures(MarketParams(N=10, Omega=10), 3, make_rng(1))
    assert negative_fraction(measures) == 0.0


@pytest.mark.parametrize("Omega, N", [(100, 400), (400, 100)])
@pytest.mark.parametrize("delta", [0.25, 1.0, 2.0])
def test_negative_fraction_at_alpha_two_ignores_omega(delta, Omega, N):
    measures = sample_perturbed_measures(MarketParams(N=N, Omega=Omega), delta, 2.0, False, make_rng(8))
    tail = float(ndtr(-1.0 / np.sqrt(delta)))
    assert expected_negative_fraction(delta, 2.0, Omega) == pytest.approx(tail, abs=2e-3)
    assert negative_fraction(measures) == pytest.approx(tail, abs=0.01)


def test_expected_negative_fraction_regimes():
    assert expected_negative_fraction(0.09, 2.0, 200) < 1e-3
    assert expected_negative_fraction(1.0, 2.6, 200) < 1e-3
    assert expected_negative_fraction(1.0, 2.3, 200) > 5e-3
    assert expected_negative_fraction(1.0, 2.0, 1) == 0.0


def test_prices_simple_cases():
    payoffs = np.array([[3.0, -1.0]])
    measures = np.array([[1.0, 0.0]])
    prices = compute_prices(payoffs, measures)
    np.testing.assert_array_equal(prices, [3.0])
    np.testing.assert_array_equal(compute_excess_returns(payoffs, prices), [[0.0, -4.0]])


def test_constant_payoffs_price_at_constant():
    params = MarketParams(N=6, Omega=9)
    measures = sample_perturbed_measures(params, 1.0, 2.0, False, make_rng(9))
    payoffs = np.full((6, 9), 2.5)
    prices = compute_prices(payoffs, measures)
    np.testing.assert_allclose(prices, 2.5, rtol=1e-12)
    np.testing.assert_allclose(compute_excess_returns(payoffs, prices), 0.0, atol=1e-12)


def test_prices_match_double_loop():
    rng = make_rng(10)
    params = MarketParams(N=5, Omega=7)
    payoffs = sample_payoffs(params, rng)
    measures = sample_perturbed_measures(params, 1.0, 2.0, False, rng).values
    expected = np.zeros(5)
    for i in range(5):
        acc = 0.0
        for w in range(7):
            acc += measures[i, w] * payoffs[i, w]
        expected[i] = acc
    np.testing.assert_array_equal(compute_prices(payoffs, measures), expected)


def test_shape_mismatch_rejected():
    with pytest.raises(ValueError):
        compute_prices(np.zeros((2, 3)), np.zeros((2, 4)))
    with pytest.raises(ValueError):
        compute_excess_returns(np.zeros((2, 3)), np.zeros(3))


@pytest.mark.parametrize(
    "family, sampler",
    [
        (SubsetUniform(kappa=0.3), SubsetSampler()),
        (PerturbedUniform(delta=1.0, alpha=2.0), PerturbedSampler()),
    ],
)
def test_pricing_identity_and_determinism(family, sampler):
    params = MarketParams(N=30, Omega=40, seed=99)
    first = sample_market(params, family, sampler)
    second = sample_market(params, family, sampler)
    np.testing.assert_array_equal(first.excess_returns, second.excess_returns)
    identity = (first.measures.values * first.excess_returns).sum(axis=1)
    np.testing.assert_allclose(identity, 0.0, atol=1e-10)
    assert first.N == 30 and first.Omega == 40
