"""Tests for the generative Monte Carlo scenarios and the KS verdict."""

import math
import sys
import os

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from scalekit.catalog import instantiate
from scalekit.exceptions import InvalidSpec, UnknownScenario
from scalekit.maxent_engine import normalize
from scalekit.models import ProcessSpec
from scalekit.simulation import (
    SCENARIOS,
    fit_against_prediction,
    ks_statistic,
    maxima_convergence,
    run_mismatch,
    run_scenario,
    simulate,
)

# Family-wise false-failure rate stays near 2% across the seed sweep.
SWEEP_KS_CONSTANT: float = 1.95
SWEEP_SEEDS: tuple[int, ...] = (0, 1, 2, 3)


# Sampling


class TestSimulate:
    """Seeded sample streams."""

    def test_same_seed_same_stream(self) -> None:
        spec = ProcessSpec(kind="waiting_time", k=3, sample_count=5000, seed=11)
        np.testing.assert_array_equal(simulate(spec), simulate(spec))

    def test_different_seed_different_stream(self) -> None:
        first = simulate(ProcessSpec(kind="stable_sum", n=10, sample_count=5000, seed=1))
        second = simulate(ProcessSpec(kind="stable_sum", n=10, sample_count=5000, seed=2))
        assert not np.array_equal(first, second)

    def test_waiting_time_mean(self) -> None:
        """Sum of k exponentials with rate r has mean k/r."""
        samples = simulate(ProcessSpec(kind="waiting_time", k=4, rate=2.0, sample_count=200_000, seed=5))
        assert samples.mean() == pytest.approx(2.0, rel=0.01)

    def test_product_log_variance(self) -> None:
        samples = simulate(ProcessSpec(kind="product", n=50, log_variance=0.02, sample_count=200_000, seed=5))
        assert np.log(samples).var() == pytest.approx(1.0, rel=0.02)

    def test_lognormal_factor_law(self) -> None:
        spec = ProcessSpec(kind="product", n=20, factor_law="lognormal", log_variance=0.05, sample_count=200_000, seed=5)
        assert np.log(simulate(spec)).var() == pytest.approx(1.0, rel=0.02)

    def test_sample_maximum_support(self) -> None:
        """Maxima of Pareto(α) parents are at least 1."""
        spec = ProcessSpec(kind="sample_maximum", n=100, parent="pareto", parent_params={"alpha": 2.0},
                           sample_count=10_000, seed=3)
        assert simulate(spec).min() >= 1.0

    def test_unknown_parent(self) -> None:
        spec = ProcessSpec(kind="sample_maximum", n=10, parent="weibull", sample_count=1000, seed=3)
        with pytest.raises(InvalidSpec):
            simulate(spec)

    def test_superstat_from_tabulated_entry(self) -> None:
        """Rates drawn from a tabulated catalog density rather than numpy's gamma sampler."""
        spec = ProcessSpec(kind="superstat_mixture", parameter_entry="exponential",
                           parameter_params={"lam": 1.0}, sample_count=5000, seed=9)
        samples = simulate(spec)
        assert samples.shape == (5000,)
        assert np.all(samples > 0.0)


# KS statistic


class TestKolmogorovSmirnov:
    """Exact one-sample statistic and the verdict threshold."""

    def test_small_example(self) -> None:
        assert ks_statistic(np.array([0.7, 0.1, 0.4]), lambda x: x) == pytest.approx(0.3)

    def test_too_few_samples(self) -> None:
        with pytest.raises(InvalidSpec):
            fit_against_prediction(np.zeros(999), normalize(instantiate("exponential", {"lam": 1.0})))

    def test_non_finite_samples(self) -> None:
        samples = np.full(2000, np.inf)
        with pytest.raises(InvalidSpec):
            fit_against_prediction(samples, normalize(instantiate("exponential", {"lam": 1.0})))

    def test_threshold(self) -> None:
        samples = np.random.Generator(np.random.PCG64(0)).exponential(1.0, 10_000)
        report = fit_against_prediction(samples, normalize(instantiate("exponential", {"lam": 1.0})), ks_constant=1.63)
        assert report.threshold == pytest.approx(1.63 / 100.0)
        assert report.sample_count == 10_000
        assert report.model_dump(by_alias=True)["pass"] == report.passed


# Scenarios


class TestScenarios:
    """Shipped stories pass against their predicted laws and fail against the wrong ones."""

    def test_six_scenarios(self) -> None:
        assert sorted(SCENARIOS) == sorted([
            "waiting_time_gamma", "product_lognormal", "maxima_gumbel",
            "maxima_frechet", "stable_sum_cauchy", "superstat_lomax",
        ])

    @pytest.mark.parametrize("seed", SWEEP_SEEDS)
    @pytest.mark.parametrize("name", sorted(SCENARIOS))
    def test_scenario_passes(self, name: str, seed: int) -> None:
        report = run_scenario(name, sample_count=100_000, seed=seed, ks_constant=SWEEP_KS_CONSTANT)
        assert report.passed, (report.ks_statistic, report.threshold)
        assert report.scenario == name
        assert report.seed == seed

    @pytest.mark.parametrize("name", sorted(SCENARIOS))
    def test_mismatch_fails(self, name: str) -> None:
        report = run_mismatch(name, sample_count=100_000, seed=42)
        assert not report.passed
        assert report.ks_statistic > 5.0 * report.threshold

    def test_default_seed_from_environment(self, monkeypatch) -> None:
        monkeypatch.setenv("SCALEKIT_SEED", "123")
        assert run_scenario("waiting_time_gamma", sample_count=2000).seed == 123

    def test_unknown_scenario(self) -> None:
        with pytest.raises(UnknownScenario):
            run_scenario("nosuch")


class TestMaximaConvergence:
    """Standardized exponential maxima approach Gumbel as the parent size grows."""

    def test_medians_shrink(self) -> None:
        medians = maxima_convergence((100, 1000, 10_000), seeds=range(5), sample_count=1_000_000)
        assert set(medians) == {100, 1000, 10_000}
        assert medians[100] > medians[1000]
        # Shared uniforms bound the change by the finite-n bias, about 0.27/n.
        assert medians[10_000] <= medians[1000] + 3e-4
        assert all(0.0 < value < 1.0 for value in medians.values())
