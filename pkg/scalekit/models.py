"""Pydantic data models for scales, distributions, transforms and reports.

All models are immutable after construction.  Scale expressions form a closed
AST discriminated by ``node``; the compact JSON form used on the command line
is handled by :mod:`scalekit.scale_algebra`.
"""

from __future__ import annotations

import math
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.integrate import cumulative_trapezoid


# Scale expressions


class Linear(BaseModel):
    """The observable value itself, w = v."""

    node: Literal["linear"] = "linear"

    model_config = ConfigDict(frozen=True)


class LogDeform(BaseModel):
    """Linear-log deformation, w = log(c + inner(v))."""

    node: Literal["logdeform"] = "logdeform"
    c: float = Field(default=0.0, ge=0.0, allow_inf_nan=False)
    inner: "ScaleExpr" = Field(default_factory=Linear)

    model_config = ConfigDict(frozen=True)


class Term(BaseModel):
    """One weighted summand of a :class:`LinearCombination`."""

    coefficient: float = Field(allow_inf_nan=False)
    inner: "ScaleExpr" = Field(default_factory=Linear)

    model_config = ConfigDict(frozen=True)


class LinearCombination(BaseModel):
    """w = offset + sum of coefficient * inner(v)."""

    node: Literal["combination"] = "combination"
    terms: Tuple[Term, ...] = Field(min_length=1)
    offset: float = Field(default=0.0, allow_inf_nan=False)

    model_config = ConfigDict(frozen=True)


class ExpDeform(BaseModel):
    """Exponential deformation, w = exp(beta * inner(v))."""

    node: Literal["exp"] = "exp"
    beta: float = Field(allow_inf_nan=False)
    inner: "ScaleExpr" = Field(default_factory=Linear)

    model_config = ConfigDict(frozen=True)


ScaleExpr = Annotated[
    Union[Linear, LogDeform, LinearCombination, ExpDeform],
    Field(discriminator="node"),
]

LogDeform.model_rebuild()
Term.model_rebuild()
LinearCombination.model_rebuild()
ExpDeform.model_rebuild()


def log_of(inner: Any = None, c: float = 0.0) -> LogDeform:
    """Shorthand for ``LogDeform(c=c, inner=inner)``."""
    return LogDeform(c=c, inner=inner if inner is not None else Linear())


def combine(*pairs: Tuple[float, Any], offset: float = 0.0) -> LinearCombination:
    """Shorthand for a :class:`LinearCombination` of ``(coefficient, inner)`` pairs."""
    return LinearCombination(
        terms=tuple(Term(coefficient=coef, inner=inner) for coef, inner in pairs),
        offset=offset,
    )


# Observables, measurement scales and transforms


class ObservableMap(BaseModel):
    """The observable f_y that the measurement scale is applied to."""

    kind: Literal["identity", "squared_deviation", "absolute_value", "log_of_value"] = "identity"
    center: float = Field(default=0.0, allow_inf_nan=False)

    model_config = ConfigDict(frozen=True)

    @classmethod
    def identity(cls) -> ObservableMap:
        return cls(kind="identity")

    @classmethod
    def squared_deviation(cls, center: float = 0.0) -> ObservableMap:
        return cls(kind="squared_deviation", center=center)

    @classmethod
    def absolute_value(cls) -> ObservableMap:
        return cls(kind="absolute_value")

    @classmethod
    def log_of_value(cls) -> ObservableMap:
        return cls(kind="log_of_value")


ScaleMode = Literal["exponential_wrap", "affine_limit"]


class MeasurementScale(BaseModel):
    """Full scaling relation T_f built on a base scale w.

    ``exponential_wrap`` evaluates (1/beta)(exp(beta*w) - 1); ``affine_limit``
    evaluates w itself and is the beta -> 0 limit of the wrap.
    """

    base: ScaleExpr = Field(default_factory=Linear)
    beta: float = Field(default=0.0, ge=0.0, allow_inf_nan=False)
    mode: ScaleMode = "affine_limit"

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_beta(self) -> MeasurementScale:
        if self.mode == "exponential_wrap" and self.beta <= 0.0:
            raise ValueError("exponential_wrap requires beta > 0")
        return self

    @classmethod
    def affine(cls, base: Any = None) -> MeasurementScale:
        return cls(base=base if base is not None else Linear(), mode="affine_limit")

    @classmethod
    def wrap(cls, base: Any, beta: float) -> MeasurementScale:
        return cls(base=base, beta=beta, mode="exponential_wrap")


class Transform(BaseModel):
    """A transformation G: shift, affine map, or power law."""

    kind: Literal["shift", "affine", "power_law"]
    delta: float = Field(default=0.0, allow_inf_nan=False)
    theta: float = Field(default=1.0, allow_inf_nan=False)
    c: float = Field(default=1.0, allow_inf_nan=False)
    gamma: float = Field(default=1.0, allow_inf_nan=False)

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_parameters(self) -> Transform:
        if self.kind == "affine" and self.theta == 0.0:
            raise ValueError("affine transform requires theta != 0")
        if self.kind == "power_law" and (self.c <= 0.0 or self.gamma == 0.0):
            raise ValueError("power_law transform requires c > 0 and gamma != 0")
        return self

    @classmethod
    def shift(cls, delta: float) -> Transform:
        return cls(kind="shift", delta=delta)

    @classmethod
    def affine(cls, delta: float, theta: float) -> Transform:
        return cls(kind="affine", delta=delta, theta=theta)

    @classmethod
    def power_law(cls, c: float, gamma: float) -> Transform:
        return cls(kind="power_law", c=c, gamma=gamma)


class InvarianceReport(BaseModel):
    """Least-squares fit of T(G(f)) = a + b*T(f) over sample points."""

    is_invariant: bool
    fitted_a: float
    fitted_b: float
    max_residual: float
    tolerance: float
    sample_count: int


# Distributions


class Interval(BaseModel):
    """Open support interval; either end may be infinite."""

    lo: float = -math.inf
    hi: float = math.inf

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_order(self) -> Interval:
        if math.isnan(self.lo) or math.isnan(self.hi) or not self.lo < self.hi:
            raise ValueError(f"degenerate support: lo={self.lo} must be < hi={self.hi}")
        return self

    @classmethod
    def positive(cls) -> Interval:
        return cls(lo=0.0, hi=math.inf)

    @classmethod
    def real_line(cls) -> Interval:
        return cls()

    def as_tuple(self) -> Tuple[float, float]:
        return self.lo, self.hi


class MeasureAdjustment(BaseModel):
    """The measure m_y: unit, |T'| (extreme values), or |g'| (change of variable)."""

    kind: Literal["unit", "scale_derivative", "change_of_variable"] = "unit"
    g: Optional[ScaleExpr] = None

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_map(self) -> MeasureAdjustment:
        if (self.kind == "change_of_variable") != (self.g is not None):
            raise ValueError("g is required exactly when kind is change_of_variable")
        return self

    @classmethod
    def unit(cls) -> MeasureAdjustment:
        return cls(kind="unit")

    @classmethod
    def scale_derivative(cls) -> MeasureAdjustment:
        return cls(kind="scale_derivative")

    @classmethod
    def change_of_variable(cls, g: Any) -> MeasureAdjustment:
        return cls(kind="change_of_variable", g=g)


class DistributionSpec(BaseModel):
    """The triple (m_y, lambda, T_f) plus support, defining p_y ∝ m_y e^{-lambda T_f}."""

    scale: MeasurementScale = Field(default_factory=MeasurementScale)
    observable: ObservableMap = Field(default_factory=ObservableMap)
    lam: Optional[float] = Field(default=None, alias="lambda", allow_inf_nan=False)
    measure: MeasureAdjustment = Field(default_factory=MeasureAdjustment)
    support: Interval = Field(default_factory=Interval)

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    def with_lambda(self, lam: float) -> DistributionSpec:
        """Return a copy bound to multiplier *lam*."""
        return self.model_copy(update={"lam": float(lam)})


class Constraint(BaseModel):
    """Average-value constraint on T_f."""

    target_mean: float = Field(allow_inf_nan=False)
    tolerance: float = Field(default=1e-10, gt=0.0)

    model_config = ConfigDict(frozen=True)


class GridDistribution(BaseModel):
    """A normalized density tabulated on a strictly increasing grid."""

    grid: np.ndarray
    density: np.ndarray
    normalization_constant: float = Field(gt=0.0)
    quadrature_error: float = Field(ge=0.0)
    spec: Optional[DistributionSpec] = None

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("grid", "density", mode="before")
    @classmethod
    def _as_array(cls, value: Any) -> np.ndarray:
        array = np.array(value, dtype=float)
        array.setflags(write=False)
        return array

    @model_validator(mode="after")
    def _check_table(self) -> GridDistribution:
        if self.grid.ndim != 1 or self.grid.shape != self.density.shape or self.grid.size < 2:
            raise ValueError("grid and density must be 1-D arrays of equal length >= 2")
        if not np.all(np.diff(self.grid) > 0):
            raise ValueError("grid must be strictly increasing")
        if not np.all(np.isfinite(self.density)) or np.any(self.density < 0):
            raise ValueError("density must be finite and nonnegative")
        return self

    # ------------------------------------------------------------------
    # Derived quantities
    # ------------------------------------------------------------------

    def total_mass(self) -> float:
        """Trapezoid integral of the density over the grid."""
        return float(np.trapezoid(self.density, self.grid))

    def cdf(self) -> np.ndarray:
        """Cumulative trapezoid integral, starting at zero on the first grid point."""
        return cumulative_trapezoid(self.density, self.grid, initial=0.0)

    def percentile(self, q: float) -> float:
        """Grid value at cumulative probability *q* (linear interpolation)."""
        cdf = self.cdf()
        return float(np.interp(q * cdf[-1], cdf, self.grid))

    def mean(self) -> float:
        return float(np.trapezoid(self.grid * self.density, self.grid))

    def rows(self) -> List[Tuple[float, float]]:
        return list(zip(self.grid.tolist(), self.density.tolist()))

    def to_json_dict(self) -> Dict[str, Any]:
        return {
            "grid": self.grid.tolist(),
            "density": self.density.tolist(),
            "psi": self.normalization_constant,
            "quadrature_error": self.quadrature_error,
        }


# Transforms


class VariableChange(BaseModel):
    """The map x = g(y) from observation scale y to dissipation scale x."""

    g: ScaleExpr
    direction: Literal["dissipation_to_observation"] = "dissipation_to_observation"
    support: Interval = Field(default_factory=Interval)

    model_config = ConfigDict(frozen=True)


class TailScale(BaseModel):
    """Upper-tail probability as a function of threshold, up to an affine map."""

    scale: MeasurementScale
    observable: ObservableMap = Field(default_factory=ObservableMap)
    support: Interval = Field(default_factory=Interval)

    model_config = ConfigDict(frozen=True)

    @classmethod
    def exponential(cls, rate: float = 1.0) -> TailScale:
        """Tail e^{-rate*y} on the real line."""
        return cls(scale=MeasurementScale.wrap(combine((-1.0, Linear())), rate))

    @classmethod
    def power_law(cls, gamma: float) -> TailScale:
        """Tail y^{-gamma} on the positive half-line."""
        return cls(
            scale=MeasurementScale.wrap(combine((-1.0, log_of())), gamma),
            support=Interval.positive(),
        )


class TransformKernel(BaseModel):
    """Kernel phi(f_y | x): e^{-x f_y} (Laplace) or e^{-i x y} (Fourier)."""

    kind: Literal["laplace", "fourier"] = "laplace"

    model_config = ConfigDict(frozen=True)


# Reports


class VerificationReport(BaseModel):
    """Recipe density versus closed form over the 1st-99th percentile range."""

    name: str
    params: Dict[str, float]
    orientation: Optional[str] = None
    max_pointwise_relerr: float
    percentile_range: Tuple[float, float]
    passed: bool = Field(alias="pass")

    model_config = ConfigDict(frozen=True, populate_by_name=True)


class ConvergenceReport(BaseModel):
    """L1 distances between two catalog densities along a parameter path."""

    name_from: str
    name_to: str
    trajectory: List[Dict[str, float]]
    distances: List[float]
    monotone: bool
    final_distance: float

    model_config = ConfigDict(frozen=True)


class ProcessSpec(BaseModel):
    """A generative Monte Carlo mechanism.

    ``n`` is the number of factors (product), parent draws (maximum) or
    summands (stable sum), depending on ``kind``.
    """

    kind: Literal["waiting_time", "product", "sample_maximum", "stable_sum", "superstat_mixture"]
    k: int = Field(default=1, ge=1)
    rate: float = Field(default=1.0, gt=0.0)
    n: int = Field(default=1, ge=1)
    factor_law: Literal["log_uniform", "lognormal"] = "log_uniform"
    log_variance: float = Field(default=1.0 / 50.0, gt=0.0)
    parent: str = "exponential"
    parent_params: Dict[str, float] = Field(default_factory=dict)
    tail_gamma: float = Field(default=1.0, gt=0.0, le=2.0)
    parameter_entry: str = "gamma"
    parameter_params: Dict[str, float] = Field(default_factory=dict)
    sample_count: int = Field(default=100_000, ge=1000)
    seed: int = Field(default=42, ge=0)

    model_config = ConfigDict(frozen=True)


class FitReport(BaseModel):
    """One-sample Kolmogorov-Smirnov verdict against a predicted density."""

    ks_statistic: float = Field(ge=0.0, le=1.0)
    sample_count: int
    threshold: float
    predicted: str
    passed: bool = Field(alias="pass")
    scenario: Optional[str] = None
    seed: Optional[int] = None

    model_config = ConfigDict(frozen=True, populate_by_name=True)
