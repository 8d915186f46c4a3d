"""Tests for normalization, multiplier solving, entropy and the discrete oracle."""

import math
import sys
import os

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from scipy.special import digamma, gammaln

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from scalekit import quadrature
from scalekit.catalog import instantiate
from scalekit.exceptions import DivergentIntegral, InfeasibleConstraint, InvalidSpec, NoBracket
from scalekit.maxent_engine import (
    discrete_maxent_oracle,
    entropy,
    mean_scale_value,
    normalize,
    solve_lambda,
    surprise_profile,
    unnormalized_density,
)
from scalekit.models import (
    Constraint,
    DistributionSpec,
    Interval,
    MeasureAdjustment,
    MeasurementScale,
    combine,
    log_of,
)

EXPONENTIAL_TEMPLATE = DistributionSpec(scale=MeasurementScale.affine(), support=Interval.positive())


# Normalization


class TestNormalize:
    """ψ and the tabulated density."""

    def test_unit_exponential(self) -> None:
        dist = normalize(EXPONENTIAL_TEMPLATE.with_lambda(1.0))
        assert dist.normalization_constant == pytest.approx(1.0, rel=1e-10)
        np.testing.assert_allclose(dist.density, np.exp(-dist.grid), rtol=1e-9)
        assert abs(dist.total_mass() - 1.0) <= 10.0 * dist.quadrature_error
        assert dist.quadrature_error < 1e-6

    def test_refined_grid_meets_mass_target(self) -> None:
        """Trapezoid error falls as 1/N²; 2^16 points put the unit exponential within 1e-8."""
        dist = normalize(EXPONENTIAL_TEMPLATE.with_lambda(1.0), n_points=1 << 16)
        assert dist.total_mass() == pytest.approx(1.0, abs=1e-8)
        assert abs(dist.total_mass() - 1.0) <= 10.0 * dist.quadrature_error

    @pytest.mark.parametrize(
        "name, params",
        [
            ("exponential", {"lam": 1.0}),
            ("gauss", {"lam": 0.5}),
            ("gamma", {"k": 3.5, "alpha": 0.7}),
            ("lognormal", {"lam": 0.5}),
            ("lomax", {"k": 3.0, "alpha": 1.0}),
        ],
    )
    def test_grid_mass_within_reported_error(self, name: str, params: dict) -> None:
        dist = normalize(instantiate(name, params))
        assert abs(dist.total_mass() - 1.0) <= 10.0 * dist.quadrature_error
        assert dist.quadrature_error < 1e-5

    def test_generalized_gamma_far_tail(self) -> None:
        """y² overflows near 1.34e154; u must vanish there rather than blow up."""
        u = unnormalized_density(instantiate("generalized_gamma", {"k": 2.0, "alpha": 1.0, "gamma": 2.0}))
        values = u(np.array([1e150, 9.48e153, 1.3e154, 1e160]))
        assert np.all(np.isfinite(values))
        np.testing.assert_array_equal(values, 0.0)
        assert np.isfinite(normalize(instantiate("generalized_gamma", {"k": 2.0, "alpha": 1.0, "gamma": 2.0})).quadrature_error)

    def test_gaussian_psi(self) -> None:
        """ψ = sqrt(λ/π) for e^{-λ y²}."""
        dist = normalize(instantiate("gauss", {"lam": 2.0}))
        assert dist.normalization_constant == pytest.approx(math.sqrt(2.0 / math.pi), rel=1e-10)

    def test_grid_is_increasing_and_sized(self) -> None:
        dist = normalize(instantiate("gamma", {"k": 2.0, "alpha": 1.0}), n_points=1024)
        assert dist.grid.size == 1024
        assert np.all(np.diff(dist.grid) > 0)
        assert dist.spec is not None

    def test_pure_power_law_diverges(self) -> None:
        spec = DistributionSpec(scale=MeasurementScale.affine(log_of()), lam=0.5, support=Interval.positive())
        with pytest.raises(DivergentIntegral):
            normalize(spec)

    def test_missing_lambda(self) -> None:
        with pytest.raises(InvalidSpec):
            unnormalized_density(EXPONENTIAL_TEMPLATE)


# Multiplier search


class TestSolveLambda:
    """E[T] = target by bracketing and Brent's method."""

    def test_exponential_rate(self) -> None:
        lam = solve_lambda(EXPONENTIAL_TEMPLATE, Constraint(target_mean=0.5))
        assert lam == pytest.approx(2.0, rel=1e-8)

    def test_gaussian_variance(self) -> None:
        """E[y²] = 1/(2λ) for e^{-λ y²}."""
        template = instantiate("gauss", {"lam": 1.0}).model_copy(update={"lam": None})
        lam = solve_lambda(template, Constraint(target_mean=0.25))
        assert lam == pytest.approx(2.0, rel=1e-8)

    def test_mean_scale_value(self) -> None:
        assert mean_scale_value(EXPONENTIAL_TEMPLATE.with_lambda(4.0)) == pytest.approx(0.25, rel=1e-9)

    def test_mean_scale_decreases_in_lambda(self) -> None:
        """For T = log(1 + y), E[T] = 1/(λ - 1)."""
        template = DistributionSpec(scale=MeasurementScale.affine(log_of(c=1.0)), support=Interval.positive())
        lams = np.geomspace(2.0, 50.0, 10)
        means = np.array([mean_scale_value(template.with_lambda(lam)) for lam in lams])
        assert np.all(np.diff(means) < 0.0)
        np.testing.assert_allclose(means, 1.0 / (lams - 1.0), rtol=1e-6)

    def test_unreachable_target(self) -> None:
        with pytest.raises(NoBracket):
            solve_lambda(EXPONENTIAL_TEMPLATE, Constraint(target_mean=-1.0))

    def test_rescaled_scale_gives_same_density(self) -> None:
        """a + bT with the multiplier re-solved reproduces the same density."""
        spec = instantiate("gauss", {"lam": 0.5})
        target = 7.0 + 2.5 * mean_scale_value(spec)
        template = spec.model_copy(update={
            "scale": MeasurementScale.affine(combine((2.5, spec.scale.base), offset=7.0)),
            "lam": None,
        })
        lam = solve_lambda(template, Constraint(target_mean=target))
        assert lam == pytest.approx(0.2, rel=1e-9)

        base = normalize(spec)
        rescaled = normalize(template.with_lambda(lam))
        mask = (base.grid > base.percentile(0.01)) & (base.grid < base.percentile(0.99))
        values = rescaled.normalization_constant * unnormalized_density(rescaled.spec)(base.grid[mask])
        np.testing.assert_allclose(values, base.density[mask], rtol=1e-9)


# Information measures


class TestEntropy:
    """Differential entropy and the surprise profile."""

    def test_unit_exponential(self) -> None:
        assert entropy(normalize(EXPONENTIAL_TEMPLATE.with_lambda(1.0))) == pytest.approx(1.0, abs=1e-6)

    def test_standard_normal(self) -> None:
        dist = normalize(instantiate("gauss", {"lam": 0.5}))
        assert entropy(dist) == pytest.approx(0.5 * math.log(2.0 * math.pi * math.e), abs=1e-6)

    def test_gamma_against_refined_grid(self) -> None:
        """H = k - log α + log Γ(k) + (1 - k) ψ(k), unchanged on a ten times finer grid."""
        k, alpha = 2.5, 1.0
        spec = instantiate("gamma", {"k": k, "alpha": alpha})
        coarse = entropy(normalize(spec))
        fine = entropy(normalize(spec, n_points=40960))
        exact = k - math.log(alpha) + float(gammaln(k)) + (1.0 - k) * float(digamma(k))
        assert coarse == pytest.approx(fine, abs=1e-5)
        assert fine == pytest.approx(exact, abs=1e-6)

    @pytest.mark.parametrize(
        "name, params",
        [("exponential", {"lam": 1.5}), ("gauss", {"lam": 0.5}), ("gamma", {"k": 2.5, "alpha": 1.0})],
    )
    def test_surprise_is_linear_in_scale(self, name: str, params: dict) -> None:
        """-log p = -log ψ + λT at every grid point."""
        spec = instantiate(name, params)
        dist = normalize(spec)
        t, surprise = np.array(surprise_profile(dist, spec)).T
        residual = surprise - spec.lam * t + math.log(dist.normalization_constant)
        assert np.max(np.abs(residual)) < 1e-8

    def test_surprise_needs_unit_measure(self) -> None:
        spec = instantiate("gumbel", {"lam": 1.0}, "max")
        assert spec.measure != MeasureAdjustment.unit()
        with pytest.raises(InvalidSpec):
            surprise_profile(normalize(spec), spec)


# Discrete oracle


class TestDiscreteOracle:
    """Finite-grid maximum entropy against the exponential-family form."""

    def test_uniform_when_target_is_centre(self) -> None:
        p = discrete_maxent_oracle([0.0, 1.0, 2.0], 1.0)
        np.testing.assert_allclose(p, [1 / 3, 1 / 3, 1 / 3], atol=1e-12)

    def test_three_points_against_bisection(self) -> None:
        """T = {0, 1, 2}, mean 0.5: the multiplier found by plain bisection gives the same p."""
        t = np.array([0.0, 1.0, 2.0])

        def mean_at(lam: float) -> float:
            weights = np.exp(-lam * t)
            return float(weights @ t / weights.sum())

        lo, hi = 0.0, 50.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            lo, hi = (mid, hi) if mean_at(mid) > 0.5 else (lo, mid)
        weights = np.exp(-0.5 * (lo + hi) * t)
        expected = weights / weights.sum()

        p = discrete_maxent_oracle(t, 0.5)
        np.testing.assert_allclose(p, expected, atol=1e-12)
        x = (math.sqrt(13.0) - 1.0) / 6.0
        np.testing.assert_allclose(p, np.array([1.0, x, x * x]) / (1.0 + x + x * x), atol=1e-12)

    def test_random_grids(self) -> None:
        """20 random grids: mean constraint met and log p linear in T."""
        rng = np.random.default_rng(2024)
        for _ in range(20):
            size = int(rng.integers(2, 513))
            t = rng.uniform(0.0, 10.0, size)
            if np.ptp(t) == 0.0:
                continue
            target = t.min() + rng.uniform(0.2, 0.8) * np.ptp(t)
            p = np.asarray(discrete_maxent_oracle(t, target))
            assert p.sum() == pytest.approx(1.0, abs=1e-12)
            assert p @ t == pytest.approx(target, abs=1e-8 * np.ptp(t))
            slope, intercept = np.polyfit(t, np.log(p), 1)
            expected = np.exp(intercept + slope * t)
            expected /= expected.sum()
            assert np.max(np.abs(p - expected)) < 1e-8

    @given(st.lists(st.floats(min_value=-50.0, max_value=50.0), min_size=2, max_size=64, unique=True),
           st.floats(min_value=0.05, max_value=0.95))
    @settings(max_examples=60, deadline=None)
    def test_probabilities_are_valid(self, t: list, fraction: float) -> None:
        values = np.asarray(t)
        assume(np.ptp(values) > 1e-6)
        target = values.min() + fraction * np.ptp(values)
        p = np.asarray(discrete_maxent_oracle(values, target))
        assert np.all(p >= 0.0)
        assert p.sum() == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("target", [-1.0, 0.0, 2.0, 3.0])
    def test_infeasible(self, target: float) -> None:
        with pytest.raises(InfeasibleConstraint):
            discrete_maxent_oracle([0.0, 1.0, 2.0], target)


# Quadrature


class TestQuadrature:
    """Probing and integration on open supports."""

    def test_out_of_domain_points_count_as_zero(self) -> None:
        u = unnormalized_density(instantiate("log2_stretched", {"lam": 1.0, "beta": 2.0}))
        values = quadrature.safe_eval(u, np.array([0.5, 2.0]))
        assert values[0] == 0.0
        assert values[1] == pytest.approx(float(u(np.array([2.0]))[0]))

    def test_integration_stays_inside_support(self) -> None:
        """The log(log y) scale is undefined below 1; nothing may be evaluated there."""
        u = unnormalized_density(instantiate("log2_stretched", {"lam": 1.0, "beta": 2.0}))
        seen = []

        def recorded(y: np.ndarray) -> np.ndarray:
            seen.append(float(np.min(y)))
            return u(y)

        envelope = quadrature.probe(recorded, 1.0, math.inf)
        integral = quadrature.integrate(recorded, envelope)
        assert min(seen) > 1.0
        assert integral.value > 0.0

    def test_inside_pulls_points_into_open_interval(self) -> None:
        assert quadrature.inside(0.5, 1.0, 2.0) > 1.0
        assert quadrature.inside(3.0, 1.0, 2.0) < 2.0
        assert quadrature.inside(1.5, 1.0, 2.0) == 1.5
