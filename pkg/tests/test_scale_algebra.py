"""Tests for scale evaluation, analytic derivatives and invariance checks."""

import math
import sys
import os

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from scalekit.exceptions import DegenerateInput, DomainError, InvalidSpec
from scalekit.models import ExpDeform, Linear, MeasurementScale, ObservableMap, Transform, combine, log_of
from scalekit.scale_algebra import (
    check_affine_invariance,
    compose_transform,
    apply_transform,
    default_sample_points,
    dump_measurement_scale,
    dump_scale,
    eval_scale,
    eval_scale_derivative,
    parse_measurement_scale,
    parse_observable,
    parse_scale,
    parse_transform,
)

IDENTITY = ObservableMap.identity()


# Evaluation


class TestEvalScale:
    """T(f(y)) for the base building blocks."""

    def test_linear_identity(self) -> None:
        assert eval_scale(MeasurementScale.affine(), IDENTITY, 2.5) == 2.5

    def test_log_deformation(self) -> None:
        assert eval_scale(MeasurementScale.affine(log_of()), IDENTITY, math.e) == pytest.approx(1.0, abs=1e-15)

    def test_shifted_log(self) -> None:
        """log(1 + y) at y = e - 1."""
        scale = MeasurementScale.affine(log_of(c=1.0))
        assert eval_scale(scale, IDENTITY, math.e - 1.0) == pytest.approx(1.0, abs=1e-15)

    def test_exponential_wrap(self) -> None:
        """(e^{βy} - 1)/β with β = 2."""
        scale = MeasurementScale.wrap(Linear(), 2.0)
        assert eval_scale(scale, IDENTITY, 0.5) == pytest.approx(math.expm1(1.0) / 2.0, rel=1e-15)

    def test_squared_deviation_observable(self) -> None:
        observable = ObservableMap.squared_deviation(1.0)
        assert eval_scale(MeasurementScale.affine(), observable, 4.0) == pytest.approx(9.0)

    def test_array_in_array_out(self) -> None:
        y = np.array([1.0, 2.0, 3.0])
        values = eval_scale(MeasurementScale.affine(log_of()), IDENTITY, y)
        assert isinstance(values, np.ndarray)
        np.testing.assert_allclose(values, np.log(y))

    def test_log_of_value_rejects_nonpositive(self) -> None:
        with pytest.raises(DomainError):
            eval_scale(MeasurementScale.affine(), ObservableMap.log_of_value(), np.array([1.0, 0.0]))

    def test_negative_log_argument_raises(self) -> None:
        with pytest.raises(DomainError):
            eval_scale(MeasurementScale.affine(log_of()), IDENTITY, -1.0)

    def test_zero_log_argument_is_minus_infinity(self) -> None:
        assert eval_scale(MeasurementScale.affine(log_of()), IDENTITY, 0.0) == -math.inf

    @pytest.mark.parametrize("beta", [1e-4, 1e-6, 1e-8])
    def test_wrap_tends_to_affine_limit(self, beta: float) -> None:
        """(y^β - 1)/β differs from log y by about β (log y)²/2."""
        y = default_sample_points()
        log_y = np.log(y)
        wrapped = MeasurementScale.wrap(log_of(), beta)
        limit = MeasurementScale.affine(log_of())
        gap = np.abs(eval_scale(wrapped, IDENTITY, y) - eval_scale(limit, IDENTITY, y))
        assert np.all(gap <= 0.6 * beta * log_y ** 2 + 1e-13)
        slope_ratio = eval_scale_derivative(wrapped, IDENTITY, y) / eval_scale_derivative(limit, IDENTITY, y)
        assert np.all(np.abs(slope_ratio - 1.0) <= 1.1 * beta * np.abs(log_y) + 1e-13)


# Derivatives


class TestDerivative:
    """Analytic derivatives through the expression tree."""

    def test_combination(self) -> None:
        """d/dy [y + 2 log y] = 1 + 2/y."""
        scale = MeasurementScale.affine(combine((1.0, Linear()), (2.0, log_of())))
        assert eval_scale_derivative(scale, IDENTITY, 2.0) == pytest.approx(2.0, rel=1e-15)

    def test_wrapped_log_matches_power(self) -> None:
        """(e^{β log y} - 1)/β = (y^β - 1)/β, derivative y^{β-1}."""
        scale = MeasurementScale.wrap(log_of(), 1.5)
        assert eval_scale_derivative(scale, IDENTITY, 4.0) == pytest.approx(2.0, rel=1e-14)

    def test_exp_deform_slope_survives_value_overflow(self) -> None:
        """d/dy y² = 2y stays finite where 2·y² would overflow."""
        scale = MeasurementScale.affine(ExpDeform(beta=2.0, inner=log_of()))
        y = np.array([1.3e154, 1e160])
        np.testing.assert_allclose(eval_scale_derivative(scale, IDENTITY, y), 2.0 * y, rtol=1e-12)

    @given(st.floats(min_value=0.1, max_value=20.0), st.floats(min_value=0.2, max_value=3.0))
    @settings(max_examples=50, deadline=None)
    def test_matches_central_difference(self, y: float, beta: float) -> None:
        """Nested log-deformation agrees with a finite difference."""
        scale = MeasurementScale.wrap(log_of(log_of(c=2.0), c=1.0), beta)
        h = 1e-6 * max(1.0, y)
        numeric = (eval_scale(scale, IDENTITY, y + h) - eval_scale(scale, IDENTITY, y - h)) / (2.0 * h)
        assert eval_scale_derivative(scale, IDENTITY, y) == pytest.approx(numeric, rel=1e-6)


# Transforms and invariance


class TestInvariance:
    """T(G(f)) = a + b T(f) checks."""

    def test_log_scale_power_law_transform(self) -> None:
        report = check_affine_invariance(
            MeasurementScale.affine(log_of()), IDENTITY, Transform.power_law(2.0, 3.0), default_sample_points()
        )
        assert report.is_invariant
        assert report.fitted_b == pytest.approx(3.0, rel=1e-12)
        assert report.fitted_a == pytest.approx(math.log(2.0), rel=1e-10)
        assert report.max_residual < 1e-9

    def test_exponential_scale_shift_transform(self) -> None:
        report = check_affine_invariance(
            MeasurementScale.wrap(Linear(), 1.0), IDENTITY, Transform.shift(0.7), default_sample_points(-2.0, 2.0)
        )
        assert report.is_invariant
        assert report.fitted_b == pytest.approx(math.exp(0.7), rel=1e-10)

    def test_log_scale_shift_fails(self) -> None:
        report = check_affine_invariance(
            MeasurementScale.affine(log_of()), IDENTITY, Transform.shift(1.0), default_sample_points()
        )
        assert not report.is_invariant
        assert report.max_residual > 1e-3

    @given(
        st.floats(min_value=-10.0, max_value=10.0),
        st.floats(min_value=0.1, max_value=10.0),
    )
    @settings(max_examples=50, deadline=None)
    def test_linear_scale_is_affine_invariant(self, delta: float, theta: float) -> None:
        report = check_affine_invariance(
            MeasurementScale.affine(), IDENTITY, Transform.affine(delta, theta), np.linspace(-5.0, 5.0, 32)
        )
        assert report.is_invariant

    def test_too_few_points(self) -> None:
        with pytest.raises(DegenerateInput):
            check_affine_invariance(MeasurementScale.affine(), IDENTITY, Transform.shift(1.0), [1.0, 1.0, 2.0])

    def test_power_law_needs_positive_input(self) -> None:
        with pytest.raises(DomainError):
            apply_transform(Transform.power_law(1.0, 2.0), -1.0)

    def test_compose(self) -> None:
        """Three shifts by 0.5 add up to 1.5."""
        assert compose_transform(Transform.shift(0.5), 1.0, 3) == pytest.approx(2.5)

    @pytest.mark.parametrize("times", [1, 2, 3, 4])
    def test_composed_power_law_stays_affine_in_log(self, times: int) -> None:
        """log Gⁿ(f) = (γⁿ - 1)/(γ - 1) log c + γⁿ log f for G(f) = c f^γ."""
        c, gamma = 1.5, 2.0
        f = np.geomspace(0.5, 2.0, 16)
        exponent = gamma ** times
        offset = (exponent - 1.0) / (gamma - 1.0) * math.log(c)
        composed = compose_transform(Transform.power_law(c, gamma), f, times)
        np.testing.assert_allclose(np.log(composed), offset + exponent * np.log(f), rtol=1e-12, atol=1e-12)
        report = check_affine_invariance(
            MeasurementScale.affine(log_of()), IDENTITY, Transform.power_law(math.exp(offset), exponent), f
        )
        assert report.is_invariant
        assert report.fitted_b == pytest.approx(exponent, rel=1e-10)
        assert report.fitted_a == pytest.approx(offset, rel=1e-10)


# JSON format


class TestJsonFormat:
    """Compact JSON expression format."""

    def test_parse_nested(self) -> None:
        node = parse_scale({"logdeform": {"c": 1.0, "inner": "linear"}})
        assert node == log_of(c=1.0)

    def test_dump_combination(self) -> None:
        data = {"combination": {"terms": [{"coef": -1.0, "inner": {"logdeform": {"c": 0.0, "inner": "linear"}}}],
                                "offset": 0.5}}
        assert dump_scale(parse_scale(data)) == data

    def test_measurement_scale_with_beta(self) -> None:
        scale = parse_measurement_scale({"base": "linear", "beta": 2.0})
        assert scale.mode == "exponential_wrap"
        assert dump_measurement_scale(scale) == {"base": "linear", "beta": 2.0, "mode": "exponential_wrap"}

    def test_observable(self) -> None:
        assert parse_observable({"squared_deviation": {"center": 2.0}}).center == 2.0
        assert parse_observable("absolute_value").kind == "absolute_value"

    def test_unknown_node(self) -> None:
        with pytest.raises(InvalidSpec):
            parse_scale({"sqrt": {}})

    def test_unknown_transform(self) -> None:
        with pytest.raises(InvalidSpec):
            parse_transform({"rotate": {"angle": 1.0}})

    @pytest.mark.parametrize("data, missing", [
        ({"exp": {}}, "beta"),
        ({"combination": {"terms": [{"inner": "linear"}]}}, "coef"),
    ])
    def test_missing_scale_field(self, data: dict, missing: str) -> None:
        with pytest.raises(InvalidSpec) as excinfo:
            parse_scale(data)
        assert excinfo.value.context["missing"] == missing

    @pytest.mark.parametrize("data, missing", [
        ({"shift": {}}, "delta"),
        ({"affine": {"delta": 1.0}}, "theta"),
        ({"power_law": {"c": 2.0}}, "gamma"),
    ])
    def test_missing_transform_field(self, data: dict, missing: str) -> None:
        with pytest.raises(InvalidSpec) as excinfo:
            parse_transform(data)
        assert excinfo.value.context["missing"] == missing
