"""Evaluation, analytic differentiation and invariance checks for measurement scales.

Base scales are walked with :func:`functools.singledispatch`; each node returns
its value together with its derivative with respect to the observable value,
so T'(f(y)) comes from the chain rule rather than finite differences.  All
evaluators accept scalars or numpy arrays.
"""

from __future__ import annotations

import functools
from typing import Any, Iterable, Tuple, Union

import numpy as np

from scalekit.exceptions import DegenerateInput, DomainError, InvalidSpec
from scalekit.models import (
    ExpDeform,
    InvarianceReport,
    Linear,
    LinearCombination,
    LogDeform,
    MeasurementScale,
    ObservableMap,
    Term,
    Transform,
)

ArrayLike = Union[float, np.ndarray]

# Invariance checks
DEFAULT_INVARIANCE_TOLERANCE: float = 1e-9
DEFAULT_SAMPLE_COUNT: int = 64


# Base scale w(v)


@functools.singledispatch
def evaluate_base(node: Any, v: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    """Return ``(w(v), dw/dv)`` for a base scale expression."""
    raise InvalidSpec(f"unsupported scale node: {type(node).__name__}")


@evaluate_base.register
def _(node: Linear, v: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    v = np.asarray(v, dtype=float)
    return v, np.ones_like(v)


@evaluate_base.register
def _(node: LogDeform, v: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    inner, d_inner = evaluate_base(node.inner, v)
    argument = node.c + inner
    # An argument that underflowed to exactly zero maps to -inf.
    if np.any(argument < 0):
        raise DomainError(
            "log deformation argument must be positive",
            {"c": node.c, "min_argument": float(np.nanmin(argument))},
        )
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log(argument), d_inner / argument


@evaluate_base.register
def _(node: LinearCombination, v: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    v = np.asarray(v, dtype=float)
    value = np.full_like(v, node.offset)
    slope = np.zeros_like(v)
    for term in node.terms:
        inner, d_inner = evaluate_base(term.inner, v)
        value = value + term.coefficient * inner
        slope = slope + term.coefficient * d_inner
    return value, slope


@evaluate_base.register
def _(node: ExpDeform, v: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    inner, d_inner = evaluate_base(node.inner, v)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        value = np.exp(node.beta * inner)
        # beta e^{beta w} w' in log space: finite wherever the slope itself is.
        slope = node.beta * np.sign(d_inner) * np.exp(node.beta * inner + np.log(np.abs(d_inner)))
    return value, slope


# Observable f(y)


def evaluate_observable(observable: ObservableMap, y: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    """Return ``(f(y), df/dy)``."""
    y = np.asarray(y, dtype=float)
    if observable.kind == "identity":
        return y, np.ones_like(y)
    if observable.kind == "squared_deviation":
        deviation = y - observable.center
        return deviation * deviation, 2.0 * deviation
    if observable.kind == "absolute_value":
        return np.abs(y), np.sign(y)
    if np.any(~(y > 0)):
        raise DomainError("log_of_value requires y > 0", {"min_y": float(np.nanmin(y))})
    return np.log(y), 1.0 / y


# Measurement scale T(w)


def wrap_base(scale: MeasurementScale, w: np.ndarray, dw: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Apply the exponential wrap (or its affine limit) to ``(w, dw)``."""
    if scale.mode == "affine_limit":
        return w, dw
    beta = scale.beta
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        return np.expm1(beta * w) / beta, np.sign(dw) * np.exp(beta * w + np.log(np.abs(dw)))


def scale_and_slope(
    scale: MeasurementScale, observable: ObservableMap, y: ArrayLike
) -> Tuple[np.ndarray, np.ndarray]:
    """Return ``(T(f(y)), dT(f(y))/dy)`` in one pass."""
    f, df = evaluate_observable(observable, y)
    w, dw = evaluate_base(scale.base, f)
    t, dt = wrap_base(scale, w, dw)
    with np.errstate(invalid="ignore", over="ignore"):
        return t, dt * df


def eval_scale(scale: MeasurementScale, observable: ObservableMap, y: ArrayLike) -> Any:
    """Evaluate T(f(y)).  Scalars in, float out; arrays in, array out."""
    value, _ = scale_and_slope(scale, observable, y)
    return float(value) if np.ndim(y) == 0 else value


def eval_scale_derivative(scale: MeasurementScale, observable: ObservableMap, y: ArrayLike) -> Any:
    """Evaluate dT(f(y))/dy analytically through the AST."""
    _, slope = scale_and_slope(scale, observable, y)
    return float(slope) if np.ndim(y) == 0 else slope


# Transforms G


def apply_transform(t: Transform, scale_input: ArrayLike) -> Any:
    """Apply G to a scale input: shift, affine map or power law."""
    x = np.asarray(scale_input, dtype=float)
    if t.kind == "shift":
        result = t.delta + x
    elif t.kind == "affine":
        result = t.delta + t.theta * x
    else:
        if np.any(~(x > 0)):
            raise DomainError("power_law transform requires positive input", {"min_input": float(np.nanmin(x))})
        result = t.c * np.power(x, t.gamma)
    return float(result) if np.ndim(scale_input) == 0 else result


def compose_transform(t: Transform, scale_input: ArrayLike, times: int) -> Any:
    """Apply *t* repeatedly, G^n(input)."""
    value = scale_input
    for _ in range(times):
        value = apply_transform(t, value)
    return value


def default_sample_points(lo: float = 1e-2, hi: float = 1e2, n: int = DEFAULT_SAMPLE_COUNT) -> np.ndarray:
    """Log-spaced points over ``[lo, hi]`` when positive, otherwise linear."""
    if lo > 0 and hi > lo:
        return np.geomspace(lo, hi, n)
    return np.linspace(lo, hi, n)


def check_affine_invariance(
    scale: MeasurementScale,
    observable: ObservableMap,
    t: Transform,
    sample_points: Iterable[float],
    tolerance: float = DEFAULT_INVARIANCE_TOLERANCE,
) -> InvarianceReport:
    """Fit T(G(f(y))) = a + b*T(f(y)) by least squares and report the worst residual."""
    points = np.unique(np.asarray(list(sample_points), dtype=float))
    if points.size < 3:
        raise DegenerateInput("at least 3 distinct sample points are required", {"distinct_points": int(points.size)})

    f, _ = evaluate_observable(observable, points)
    original, _ = wrap_base(scale, *evaluate_base(scale.base, f))
    transformed, _ = wrap_base(scale, *evaluate_base(scale.base, np.asarray(apply_transform(t, f))))
    if not (np.all(np.isfinite(original)) and np.all(np.isfinite(transformed))):
        raise DomainError("scale is not finite at every sample point")
    if np.ptp(original) == 0.0:
        raise DegenerateInput("scale values coincide at every sample point; fit is underdetermined")

    design = np.column_stack([np.ones_like(original), original])
    (fitted_a, fitted_b), *_ = np.linalg.lstsq(design, transformed, rcond=None)
    max_residual = float(np.max(np.abs(transformed - (fitted_a + fitted_b * original))))

    return InvarianceReport(
        is_invariant=max_residual < tolerance,
        fitted_a=float(fitted_a),
        fitted_b=float(fitted_b),
        max_residual=max_residual,
        tolerance=tolerance,
        sample_count=int(points.size),
    )


# JSON expression format


def _field(body: Any, key: str, node: str) -> Any:
    """Fetch a required field of a JSON node, reporting which one is missing."""
    if not isinstance(body, dict) or key not in body:
        raise InvalidSpec(f"{node} needs a {key!r} field", {"node": node, "missing": key})
    return body[key]


def parse_scale(data: Any) -> Any:
    """Build a scale expression from its compact JSON form.

    ``"linear"``, ``{"logdeform": {"c": 1.0, "inner": "linear"}}``,
    ``{"combination": {"terms": [{"coef": 2.0, "inner": "linear"}], "offset": 0.0}}``
    and ``{"exp": {"beta": 1.0, "inner": "linear"}}``.
    """
    if data == "linear":
        return Linear()
    if isinstance(data, dict) and len(data) == 1:
        (tag, body), = data.items()
        if not isinstance(body, dict):
            raise InvalidSpec(f"scale node {tag!r} needs an object body")
        if tag == "logdeform":
            return LogDeform(c=body.get("c", 0.0), inner=parse_scale(body.get("inner", "linear")))
        if tag == "exp":
            return ExpDeform(beta=_field(body, "beta", "exp"), inner=parse_scale(body.get("inner", "linear")))
        if tag == "combination":
            terms = tuple(
                Term(coefficient=_field(item, "coef", "combination term"), inner=parse_scale(item.get("inner", "linear")))
                for item in body.get("terms", [])
            )
            return LinearCombination(terms=terms, offset=body.get("offset", 0.0))
    raise InvalidSpec("unrecognised scale expression", {"expression": data})


@functools.singledispatch
def dump_scale(node: Any) -> Any:
    """Render a scale expression in the compact JSON form."""
    raise InvalidSpec(f"unsupported scale node: {type(node).__name__}")


@dump_scale.register
def _(node: Linear) -> Any:
    return "linear"


@dump_scale.register
def _(node: LogDeform) -> Any:
    return {"logdeform": {"c": node.c, "inner": dump_scale(node.inner)}}


@dump_scale.register
def _(node: ExpDeform) -> Any:
    return {"exp": {"beta": node.beta, "inner": dump_scale(node.inner)}}


@dump_scale.register
def _(node: LinearCombination) -> Any:
    terms = [{"coef": term.coefficient, "inner": dump_scale(term.inner)} for term in node.terms]
    return {"combination": {"terms": terms, "offset": node.offset}}


def parse_measurement_scale(data: Any) -> MeasurementScale:
    """Accept either a bare base expression or ``{"base", "beta", "mode"}``."""
    if isinstance(data, dict) and "base" in data:
        mode = data.get("mode") or ("exponential_wrap" if data.get("beta") else "affine_limit")
        return MeasurementScale(base=parse_scale(data["base"]), beta=data.get("beta", 0.0), mode=mode)
    return MeasurementScale.affine(parse_scale(data))


def dump_measurement_scale(scale: MeasurementScale) -> dict:
    return {"base": dump_scale(scale.base), "beta": scale.beta, "mode": scale.mode}


def parse_observable(data: Any) -> ObservableMap:
    """``"identity"``, ``"absolute_value"``, ``"log_of_value"`` or ``{"squared_deviation": {"center": mu}}``."""
    if data in ("identity", "absolute_value", "log_of_value"):
        return ObservableMap(kind=data)
    if isinstance(data, dict) and set(data) == {"squared_deviation"}:
        return ObservableMap.squared_deviation((data["squared_deviation"] or {}).get("center", 0.0))
    raise InvalidSpec("unrecognised observable", {"observable": data})


def dump_observable(observable: ObservableMap) -> Any:
    if observable.kind == "squared_deviation":
        return {"squared_deviation": {"center": observable.center}}
    return observable.kind


def parse_transform(data: Any) -> Transform:
    """``{"shift": {"delta"}}``, ``{"affine": {"delta", "theta"}}`` or ``{"power_law": {"c", "gamma"}}``."""
    if isinstance(data, dict) and len(data) == 1:
        (tag, body), = data.items()
        body = body or {}
        if tag == "shift":
            return Transform.shift(_field(body, "delta", tag))
        if tag == "affine":
            return Transform.affine(_field(body, "delta", tag), _field(body, "theta", tag))
        if tag == "power_law":
            return Transform.power_law(_field(body, "c", tag), _field(body, "gamma", tag))
    raise InvalidSpec("unrecognised transform", {"transform": data})

