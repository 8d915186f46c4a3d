"""Tests for the pydantic value types in scalekit.models."""

import math
import sys
import os

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from pydantic import ValidationError

from scalekit.models import (
    Constraint,
    DistributionSpec,
    FitReport,
    GridDistribution,
    Interval,
    Linear,
    LinearCombination,
    LogDeform,
    MeasureAdjustment,
    MeasurementScale,
    ProcessSpec,
    TailScale,
    Transform,
    VerificationReport,
    combine,
    log_of,
)


# Scale expressions


class TestScaleExpressions:
    """Frozen expression trees."""

    def test_log_of_defaults(self) -> None:
        node = log_of()
        assert isinstance(node, LogDeform)
        assert node.c == 0.0
        assert isinstance(node.inner, Linear)

    def test_negative_offset_rejected(self) -> None:
        with pytest.raises(ValidationError):
            LogDeform(c=-1.0)

    def test_combination_needs_a_term(self) -> None:
        with pytest.raises(ValidationError):
            LinearCombination(terms=())

    def test_combine_builds_terms(self) -> None:
        node = combine((2.0, Linear()), (-1.0, log_of()), offset=3.0)
        assert [term.coefficient for term in node.terms] == [2.0, -1.0]
        assert node.offset == 3.0

    def test_frozen(self) -> None:
        with pytest.raises(ValidationError):
            log_of().c = 2.0


class TestMeasurementScale:
    """Wrap versus affine limit."""

    def test_wrap_needs_positive_beta(self) -> None:
        with pytest.raises(ValidationError):
            MeasurementScale.wrap(Linear(), 0.0)

    def test_affine_default_base(self) -> None:
        scale = MeasurementScale.affine()
        assert scale.mode == "affine_limit"
        assert isinstance(scale.base, Linear)

    def test_power_law_tail(self) -> None:
        tail = TailScale.power_law(2.0)
        assert tail.scale.beta == 2.0
        assert tail.support == Interval.positive()


class TestTransform:
    """Parameter checks on G."""

    def test_affine_zero_theta(self) -> None:
        with pytest.raises(ValidationError):
            Transform.affine(1.0, 0.0)

    @pytest.mark.parametrize("c, gamma", [(0.0, 1.0), (-2.0, 1.0), (1.0, 0.0)])
    def test_power_law_parameters(self, c: float, gamma: float) -> None:
        with pytest.raises(ValidationError):
            Transform.power_law(c, gamma)

    def test_shift(self) -> None:
        assert Transform.shift(2.5).delta == 2.5


# Supports and measures


class TestInterval:
    """Open supports."""

    def test_defaults_to_real_line(self) -> None:
        assert Interval().as_tuple() == (-math.inf, math.inf)

    @pytest.mark.parametrize("lo, hi", [(1.0, 1.0), (2.0, 1.0), (math.nan, 1.0)])
    def test_degenerate(self, lo: float, hi: float) -> None:
        with pytest.raises(ValidationError):
            Interval(lo=lo, hi=hi)


class TestMeasureAdjustment:
    """g is present exactly for a change of variable."""

    def test_change_of_variable_needs_map(self) -> None:
        with pytest.raises(ValidationError):
            MeasureAdjustment(kind="change_of_variable")

    def test_unit_rejects_map(self) -> None:
        with pytest.raises(ValidationError):
            MeasureAdjustment(kind="unit", g=Linear())

    def test_change_of_variable(self) -> None:
        assert MeasureAdjustment.change_of_variable(log_of()).kind == "change_of_variable"


class TestDistributionSpec:
    """Templates and the lambda alias."""

    def test_lambda_alias(self) -> None:
        spec = DistributionSpec.model_validate({"lambda": 1.5})
        assert spec.lam == 1.5

    def test_with_lambda_keeps_template(self) -> None:
        template = DistributionSpec(support=Interval.positive())
        spec = template.with_lambda(2.0)
        assert template.lam is None
        assert spec.lam == 2.0
        assert spec.support == template.support

    def test_constraint_tolerance_positive(self) -> None:
        with pytest.raises(ValidationError):
            Constraint(target_mean=1.0, tolerance=0.0)


# Tabulated densities


class TestGridDistribution:
    """Validation and derived quantities."""

    def _uniform(self) -> GridDistribution:
        grid = np.linspace(0.0, 1.0, 101)
        return GridDistribution(grid=grid, density=np.ones_like(grid), normalization_constant=1.0, quadrature_error=0.0)

    def test_lists_become_readonly_arrays(self) -> None:
        dist = GridDistribution(grid=[0.0, 1.0], density=[1.0, 1.0], normalization_constant=1.0, quadrature_error=0.0)
        assert isinstance(dist.grid, np.ndarray)
        with pytest.raises(ValueError):
            dist.grid[0] = 5.0

    def test_non_increasing_grid(self) -> None:
        with pytest.raises(ValidationError):
            GridDistribution(grid=[0.0, 0.0, 1.0], density=[1.0, 1.0, 1.0], normalization_constant=1.0, quadrature_error=0.0)

    def test_negative_density(self) -> None:
        with pytest.raises(ValidationError):
            GridDistribution(grid=[0.0, 1.0], density=[1.0, -0.5], normalization_constant=1.0, quadrature_error=0.0)

    def test_shape_mismatch(self) -> None:
        with pytest.raises(ValidationError):
            GridDistribution(grid=[0.0, 1.0, 2.0], density=[1.0, 1.0], normalization_constant=1.0, quadrature_error=0.0)

    def test_psi_positive(self) -> None:
        with pytest.raises(ValidationError):
            GridDistribution(grid=[0.0, 1.0], density=[1.0, 1.0], normalization_constant=0.0, quadrature_error=0.0)

    def test_uniform_quantities(self) -> None:
        dist = self._uniform()
        assert dist.total_mass() == pytest.approx(1.0)
        assert dist.mean() == pytest.approx(0.5)
        assert dist.percentile(0.25) == pytest.approx(0.25)
        cdf = dist.cdf()
        assert cdf[0] == 0.0
        assert cdf[-1] == pytest.approx(1.0)

    def test_json_dict(self) -> None:
        payload = self._uniform().to_json_dict()
        assert set(payload) == {"grid", "density", "psi", "quadrature_error"}
        assert len(payload["grid"]) == 101


# Reports and processes


class TestReports:
    """``pass`` is the serialized name of ``passed``."""

    def test_fit_report_alias(self) -> None:
        report = FitReport(ks_statistic=0.01, sample_count=1000, threshold=0.05, predicted="exponential", passed=True)
        dumped = report.model_dump(by_alias=True)
        assert dumped["pass"] is True
        assert "passed" not in dumped

    def test_fit_report_statistic_bounds(self) -> None:
        with pytest.raises(ValidationError):
            FitReport(ks_statistic=1.5, sample_count=1000, threshold=0.05, predicted="x", passed=False)

    def test_verification_report_from_alias(self) -> None:
        report = VerificationReport.model_validate({
            "name": "gauss", "params": {"lam": 0.5}, "max_pointwise_relerr": 1e-12,
            "percentile_range": [-2.3, 2.3], "pass": True,
        })
        assert report.passed
        assert report.percentile_range == (-2.3, 2.3)


class TestProcessSpec:
    """Bounds on generative mechanisms."""

    def test_minimum_sample_count(self) -> None:
        with pytest.raises(ValidationError):
            ProcessSpec(kind="waiting_time", sample_count=999)

    def test_stable_index_range(self) -> None:
        with pytest.raises(ValidationError):
            ProcessSpec(kind="stable_sum", tail_gamma=2.5)

    def test_unknown_kind(self) -> None:
        with pytest.raises(ValidationError):
            ProcessSpec(kind="random_walk")

    def test_defaults(self) -> None:
        spec = ProcessSpec(kind="product")
        assert spec.sample_count == 100_000
        assert spec.seed == 42
        assert spec.factor_law == "log_uniform"
