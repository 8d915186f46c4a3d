"""Named maximum-entropy distributions as (scale, measure, λ) recipes.

Each entry binds its conventional parameters (λ, β, k, α, γ, b, c₁, c₂...)
to a :class:`DistributionSpec` through a recipe function, and carries the
closed-form density as a :mod:`sympy` expression so the recipe can be
checked pointwise.

Registration mirrors a command registry::

    @catalog.register("exponential", parameters={"lam": None}, ...)
    def exponential(p, orientation): ...

Parameter conversions that are not one-to-one live in the recipes:

- gamma: y^{k-1} e^{-αy} is e^{-λT} with λ = k - 1 and
  T = -log y + (α/(k-1)) y; at k = 1 the scale degenerates to T = y, λ = α.
- beta_prime: the whole exponent is carried by the scale and λ = 1.
- wrapped scales: e^{-λ e^{βw}} needs an internal multiplier λβ because
  T = (e^{βw} - 1)/β.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import sympy as sp

from core.logger import ScalekitLogger
from scalekit import quadrature
from scalekit.exceptions import ParameterOutOfDomain, UnknownDistribution
from scalekit.maxent_engine import normalize, unnormalized_density
from scalekit.models import (
    ConvergenceReport,
    DistributionSpec,
    ExpDeform,
    GridDistribution,
    Interval,
    Linear,
    MeasureAdjustment,
    MeasurementScale,
    ObservableMap,
    VerificationReport,
    combine,
    log_of,
)

logger = ScalekitLogger.get_logger()

Params = Dict[str, float]
Recipe = Callable[[Params, Optional[str]], DistributionSpec]

VERIFY_TOLERANCE: float = 1e-8
PERCENTILE_RANGE: Tuple[float, float] = (0.01, 0.99)
MONOTONE_SLACK: float = 1e-9

# Symbols used by closed forms; parameter names map onto these.
y = sp.Symbol("y", real=True)
SYMBOLS: Dict[str, sp.Symbol] = {
    name: sp.Symbol(name, real=True)
    for name in ("lam", "beta", "k", "alpha", "gamma", "b", "c1", "c2", "mu", "nu", "y_max")
}
lam, beta, k, alpha, gamma, b, c1, c2, mu, nu = (
    SYMBOLS[name] for name in ("lam", "beta", "k", "alpha", "gamma", "b", "c1", "c2", "mu", "nu")
)

PARAMETER_ALIASES: Dict[str, str] = {"lambda": "lam"}


# Registry


@dataclasses.dataclass(frozen=True, slots=True)
class CatalogEntry:
    """One named distribution."""

    name: str
    recipe: Recipe
    closed_forms: Dict[str, sp.Expr]
    parameters: Dict[str, Optional[float]]
    domain: Dict[str, Callable[[Params], bool]]
    base_label: str
    notes: str
    verify_params: Tuple[Params, ...]

    @property
    def orientations(self) -> Tuple[str, ...]:
        """Named orientations, first is the default; empty when there is only one form."""
        keys = tuple(self.closed_forms)
        return () if keys == ("default",) else keys

    def closed_form(self, orientation: Optional[str] = None) -> sp.Expr:
        return self.closed_forms[orientation or next(iter(self.closed_forms))]

    def closed_density(self, params: Params, orientation: Optional[str] = None) -> Callable[[np.ndarray], np.ndarray]:
        """The (unnormalized) closed form as a numpy callable of y."""
        names = tuple(self.parameters)
        func = sp.lambdify((y, *(SYMBOLS[name] for name in names)), self.closed_form(orientation), "numpy")
        values = tuple(params[name] for name in names)

        def density(points: np.ndarray) -> np.ndarray:
            points = np.asarray(points, dtype=float)
            return np.broadcast_to(np.asarray(func(points, *values), dtype=float), points.shape)

        return density

    def describe(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "parameters": {name: default for name, default in self.parameters.items()},
            "domain": list(self.domain),
            "orientations": list(self.orientations),
            "closed_form": {key: str(expr) for key, expr in self.closed_forms.items()},
            "base_scale": self.base_label,
            "notes": self.notes,
        }


class Catalog:
    """Singleton registry of catalog entries."""

    _instance: Optional[Catalog] = None
    _entries: Dict[str, CatalogEntry]

    def __new__(cls) -> Catalog:
        if cls._instance is None:
            inst = super().__new__(cls)
            inst._entries = {}
            cls._instance = inst
        return cls._instance

    def register(
        self,
        name: str,
        *,
        parameters: Dict[str, Optional[float]],
        domain: Dict[str, Callable[[Params], bool]],
        closed_forms: Dict[str, sp.Expr],
        base: str,
        notes: str,
        verify: Sequence[Params],
    ) -> Callable[[Recipe], Recipe]:
        """Decorator that registers a recipe under *name*."""

        def decorator(func: Recipe) -> Recipe:
            self._entries[name] = CatalogEntry(
                name=name,
                recipe=func,
                closed_forms=dict(closed_forms),
                parameters=dict(parameters),
                domain=dict(domain),
                base_label=base,
                notes=notes,
                verify_params=tuple(dict(p) for p in verify),
            )
            return func

        return decorator

    def get(self, name: str) -> CatalogEntry:
        entry = self._entries.get(name)
        if entry is None:
            raise UnknownDistribution(f"no catalog entry named {name!r}", {"name": name, "known": self.names()})
        return entry

    def names(self) -> List[str]:
        return sorted(self._entries)

    def entries(self) -> Dict[str, CatalogEntry]:
        return dict(self._entries)


catalog = Catalog()


# Parameter binding


def bind_parameters(entry: CatalogEntry, params: Mapping[str, float]) -> Params:
    """Resolve aliases and defaults, then check every domain rule."""
    bound: Params = {}
    for key, value in params.items():
        name = PARAMETER_ALIASES.get(key, key)
        if name not in entry.parameters:
            raise ParameterOutOfDomain(
                f"unknown parameter {key!r} for {entry.name}",
                {"name": entry.name, "parameter": key, "accepted": list(entry.parameters)},
            )
        value = float(value)
        if not math.isfinite(value):
            raise ParameterOutOfDomain(f"parameter {key!r} must be finite", {"name": entry.name, key: value})
        bound[name] = value
    for name, default in entry.parameters.items():
        if name not in bound:
            if default is None:
                raise ParameterOutOfDomain(f"missing parameter {name!r} for {entry.name}", {"name": entry.name})
            bound[name] = default
    for rule, check in entry.domain.items():
        if not check(bound):
            raise ParameterOutOfDomain(
                f"{entry.name} requires {rule}", {"name": entry.name, "rule": rule, "params": bound}
            )
    return bound


def _resolve_orientation(entry: CatalogEntry, orientation: Optional[str]) -> Optional[str]:
    if not entry.orientations:
        if orientation is not None:
            raise ParameterOutOfDomain(f"{entry.name} has no orientations", {"orientation": orientation})
        return None
    if orientation is None:
        return entry.orientations[0]
    if orientation not in entry.orientations:
        raise ParameterOutOfDomain(
            f"unknown orientation {orientation!r} for {entry.name}",
            {"orientation": orientation, "accepted": list(entry.orientations)},
        )
    return orientation


def instantiate(name: str, params: Mapping[str, float], orientation: Optional[str] = None) -> DistributionSpec:
    """Bind *params* into the named recipe.

    Raises:
        UnknownDistribution: *name* is not registered.
        ParameterOutOfDomain: a parameter is unknown, missing, or out of range.
    """
    entry = catalog.get(name)
    bound = bind_parameters(entry, params)
    return entry.recipe(bound, _resolve_orientation(entry, orientation))


# Verification


def _normalized_closed_form(
    entry: CatalogEntry, params: Params, orientation: Optional[str], spec: DistributionSpec
) -> Callable[[np.ndarray], np.ndarray]:
    c = entry.closed_density(params, orientation)
    envelope = quadrature.probe(c, spec.support.lo, spec.support.hi)
    psi = 1.0 / quadrature.integrate(c, envelope).value
    return lambda points: psi * c(points)


def max_relative_error(dist: GridDistribution, reference: Callable[[np.ndarray], np.ndarray]) -> Tuple[float, Tuple[float, float]]:
    """Largest |p/ref - 1| over the 1st-99th percentile range of *dist*."""
    lo, hi = (dist.percentile(q) for q in PERCENTILE_RANGE)
    mask = (dist.grid >= lo) & (dist.grid <= hi)
    expected = quadrature.safe_eval(reference, dist.grid[mask])
    with np.errstate(divide="ignore", invalid="ignore"):
        relerr = np.abs(dist.density[mask] - expected) / expected
    worst = float(np.max(relerr)) if relerr.size else math.inf
    return (worst if math.isfinite(worst) else math.inf), (lo, hi)


def verify_entry(name: str, params: Mapping[str, float], orientation: Optional[str] = None) -> VerificationReport:
    """Compare the normalized recipe density with the normalized closed form."""
    entry = catalog.get(name)
    bound = bind_parameters(entry, params)
    orientation = _resolve_orientation(entry, orientation)
    spec = entry.recipe(bound, orientation)

    dist = normalize(spec)
    reference = _normalized_closed_form(entry, bound, orientation, spec)
    worst, window = max_relative_error(dist, reference)

    report = VerificationReport(
        name=name, params=bound, orientation=orientation,
        max_pointwise_relerr=worst, percentile_range=window, passed=worst < VERIFY_TOLERANCE,
    )
    logger.info("Verified catalog entry", extra={"name": name, "params": bound, "relerr": worst, "pass": report.passed})
    return report


# Limits and special cases


def _masked(spec: DistributionSpec, psi: float) -> Callable[[np.ndarray], np.ndarray]:
    u = unnormalized_density(spec)
    lo, hi = spec.support.as_tuple()

    def density(points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        inside = (points > lo) & (points < hi)
        values = np.zeros_like(points)
        if np.any(inside):
            values[inside] = psi * u(points[inside])
        return values

    return density


def l1_distance(first: DistributionSpec, second: DistributionSpec) -> float:
    """∫ |p₁ - p₂| dy over the union of the two supports."""
    p1 = _masked(first, normalize(first).normalization_constant)
    p2 = _masked(second, normalize(second).normalization_constant)
    lo = min(first.support.lo, second.support.lo)
    hi = max(first.support.hi, second.support.hi)
    envelope = quadrature.probe(lambda v: p1(v) + p2(v), lo, hi)
    return quadrature.integrate(lambda v: np.abs(p1(v) - p2(v)), envelope).value


def limit_check(
    name_from: str,
    name_to: str,
    trajectory: Sequence[Mapping[str, float]],
    target_params: Mapping[str, float],
    orientation: Optional[str] = None,
) -> ConvergenceReport:
    """L1 distances from ``name_from`` along *trajectory* to a fixed ``name_to`` density."""
    target = instantiate(name_to, target_params)
    distances = [l1_distance(instantiate(name_from, step, orientation), target) for step in trajectory]
    monotone = all(later < earlier + MONOTONE_SLACK for earlier, later in zip(distances, distances[1:]))
    logger.info("Limit check", extra={"from": name_from, "to": name_to, "distances": distances, "monotone": monotone})
    return ConvergenceReport(
        name_from=name_from,
        name_to=name_to,
        trajectory=[dict(step) for step in trajectory],
        distances=distances,
        monotone=monotone,
        final_distance=distances[-1],
    )


@dataclasses.dataclass(frozen=True, slots=True)
class Limit:
    """A trajectory of parameters along which one entry tends to another."""

    description: str
    name_from: str
    name_to: str
    trajectory: Tuple[Params, ...]
    target_params: Params


def limits() -> Tuple[Limit, ...]:
    """Documented limiting cases, each checked with :func:`limit_check`."""
    return (
        Limit("gamma tends to the exponential as k -> 1", "gamma", "exponential",
              tuple({"k": k, "alpha": 1.0} for k in (3.0, 2.0, 1.5, 1.2, 1.05)), {"lam": 1.0}),
        Limit("Lomax with k = alpha tends to the exponential as alpha grows", "lomax", "exponential",
              tuple({"k": a, "alpha": a} for a in (2.0, 10.0, 100.0)), {"lam": 1.0}),
        Limit("Student's t with nu degrees of freedom tends to the standard Gaussian",
              "generalized_students", "gauss",
              tuple({"k": (nu + 1.0) / 2.0, "alpha": nu} for nu in (2.0, 8.0, 32.0, 128.0)), {"lam": 0.5}),
    )


def tail_exponent(
    name: str, params: Mapping[str, float], lo: float, hi: float,
    orientation: Optional[str] = None, points: int = 64,
) -> float:
    """Log-log regression slope of the closed-form density over ``[lo, hi]``."""
    entry = catalog.get(name)
    bound = bind_parameters(entry, params)
    density = entry.closed_density(bound, _resolve_orientation(entry, orientation))
    ys = np.geomspace(lo, hi, points)
    slope, _ = np.polyfit(np.log(ys), np.log(density(ys)), 1)
    return float(slope)


Side = Tuple[str, Params, Optional[str]]


def _cauchy(y: np.ndarray) -> np.ndarray:
    return 1.0 / (math.pi * (1.0 + np.asarray(y, dtype=float) ** 2))


@dataclasses.dataclass(frozen=True, slots=True)
class Relation:
    """Two sides that must agree pointwise; the right side may be a normalized density."""

    description: str
    left: Side
    right: Union[Side, Callable[[np.ndarray], np.ndarray]]


def relations() -> Tuple[Relation, ...]:
    """Documented special cases between catalog entries."""
    return (
        Relation("chi-square with nu degrees of freedom is gamma(nu/2, 1/2)",
                 ("chi_square", {"nu": 4.0}, None), ("gamma", {"k": 2.0, "alpha": 0.5}, None)),
        Relation("Rayleigh is gamma-Gauss with k = 2",
                 ("rayleigh", {"lam": 1.0}, None), ("gamma_gauss", {"k": 2.0, "alpha": 1.0}, None)),
        Relation("Rayleigh is Weibull with beta = 2",
                 ("rayleigh", {"lam": 0.5}, None), ("frechet_weibull", {"lam": 0.5, "beta": 2.0}, "weibull")),
        Relation("Weibull with beta = 1 is exponential",
                 ("frechet_weibull", {"lam": 1.5, "beta": 1.0}, "weibull"), ("exponential", {"lam": 1.5}, None)),
        Relation("stretched exponential with beta = 1 is exponential",
                 ("stretched_exponential", {"lam": 2.0, "beta": 1.0}, None), ("exponential", {"lam": 2.0}, None)),
        Relation("gamma with k = 1 is exponential",
                 ("gamma", {"k": 1.0, "alpha": 2.0}, None), ("exponential", {"lam": 2.0}, None)),
        Relation("stretched exponential with beta = 2 is the Gaussian on the half line",
                 ("stretched_exponential", {"lam": 0.5, "beta": 2.0}, None), ("gauss", {"lam": 0.5}, None)),
        Relation("generalized Student's with k = alpha = 1 is the Cauchy density",
                 ("generalized_students", {"k": 1.0, "alpha": 1.0}, None), _cauchy),
    )


def check_relation(relation: Relation) -> float:
    """Max relative error between the two sides, on the left side's grid.

    A catalog right side is normalized over the left side's support.
    """
    left_name, left_params, left_orientation = relation.left
    left_spec = instantiate(left_name, left_params, left_orientation)
    left = normalize(left_spec)
    if callable(relation.right):
        reference = relation.right
    else:
        right_name, right_params, right_orientation = relation.right
        right_spec = instantiate(right_name, right_params, right_orientation)
        right_spec = right_spec.model_copy(update={"support": left_spec.support})
        reference = _masked(right_spec, normalize(right_spec).normalization_constant)
    worst, _ = max_relative_error(left, reference)
    return worst


# Entries

_POSITIVE = Interval.positive()
_REAL = Interval.real_line()


def _positive(*names: str) -> Dict[str, Callable[[Params], bool]]:
    return {f"{name} > 0": (lambda p, name=name: p[name] > 0.0) for name in names}


@catalog.register(
    "gumbel",
    parameters={"lam": None, "beta": 1.0},
    domain=_positive("lam", "beta"),
    closed_forms={
        "max": sp.exp(-beta * y - lam * sp.exp(-beta * y)),
        "min": sp.exp(beta * y - lam * sp.exp(beta * y)),
    },
    base="Linear, exponential wrap, m_y = |T'|",
    notes="Extreme values with exponential tails. 'max' uses w = -y (sample maxima); "
          "'min' uses w = y, the reflected form.",
    verify=({"lam": 1.0, "beta": 1.0}, {"lam": 2.0, "beta": 0.5}, {"lam": 0.5, "beta": 3.0}),
)
def gumbel(p: Params, orientation: Optional[str]) -> DistributionSpec:
    base = combine((-1.0, Linear())) if orientation == "max" else Linear()
    return DistributionSpec(
        scale=MeasurementScale.wrap(base, p["beta"]),
        lam=p["lam"] * p["beta"],
        measure=MeasureAdjustment.scale_derivative(),
        support=_REAL,
    )


@catalog.register(
    "exponential",
    parameters={"lam": None},
    domain=_positive("lam"),
    closed_forms={"default": sp.exp(-lam * y)},
    base="Linear, beta -> 0",
    notes="Gibbs / exponential.",
    verify=({"lam": 1.0}, {"lam": 0.25}, {"lam": 7.0}),
)
def exponential(p: Params, orientation: Optional[str]) -> DistributionSpec:
    return DistributionSpec(scale=MeasurementScale.affine(), lam=p["lam"], support=_POSITIVE)


@catalog.register(
    "gauss",
    parameters={"lam": None, "mu": 0.0},
    domain=_positive("lam"),
    closed_forms={"default": sp.exp(-lam * (y - mu) ** 2)},
    base="Linear, beta -> 0, f_y = (y - mu)^2",
    notes="lambda = 1/(2 sigma^2).",
    verify=({"lam": 0.5}, {"lam": 2.0, "mu": 1.0}, {"lam": 0.05, "mu": -3.0}),
)
def gauss(p: Params, orientation: Optional[str]) -> DistributionSpec:
    return DistributionSpec(
        scale=MeasurementScale.affine(),
        observable=ObservableMap.squared_deviation(p["mu"]),
        lam=p["lam"],
        support=_REAL,
    )


@catalog.register(
    "rayleigh",
    parameters={"lam": None},
    domain=_positive("lam"),
    closed_forms={"default": y * sp.exp(-lam * y ** 2)},
    base="Linear, beta -> 0, f_y = y^2, m_y = |T'|",
    notes="Gamma-Gauss with k = 2; Weibull with beta = 2.",
    verify=({"lam": 1.0}, {"lam": 0.5}, {"lam": 4.0}),
)
def rayleigh(p: Params, orientation: Optional[str]) -> DistributionSpec:
    return DistributionSpec(
        scale=MeasurementScale.affine(),
        observable=ObservableMap.squared_deviation(0.0),
        lam=p["lam"],
        measure=MeasureAdjustment.scale_derivative(),
        support=_POSITIVE,
    )


@catalog.register(
    "lognormal",
    parameters={"lam": None, "mu": 0.0},
    domain=_positive("lam"),
    closed_forms={"default": sp.exp(-lam * (sp.log(y) - mu) ** 2) / y},
    base="Linear, beta -> 0, f_y = (x - mu)^2 with x = log y, m_y = 1/y",
    notes="Gaussian on the logarithmic scale.",
    verify=({"lam": 0.5}, {"lam": 2.0, "mu": 1.0}, {"lam": 0.1, "mu": -0.5}),
)
def lognormal(p: Params, orientation: Optional[str]) -> DistributionSpec:
    return DistributionSpec(
        scale=MeasurementScale.affine(),
        observable=ObservableMap.squared_deviation(p["mu"]),
        lam=p["lam"],
        measure=MeasureAdjustment.change_of_variable(log_of()),
        support=_POSITIVE,
    )


@catalog.register(
    "stretched_exponential",
    parameters={"lam": None, "beta": None},
    domain=_positive("lam", "beta"),
    closed_forms={"default": sp.exp(-lam * y ** beta)},
    base="Log, exponential wrap",
    notes="Gauss on the half line with beta = 2.",
    verify=({"lam": 1.0, "beta": 0.5}, {"lam": 2.0, "beta": 2.0}, {"lam": 0.5, "beta": 1.5}),
)
def stretched_exponential(p: Params, orientation: Optional[str]) -> DistributionSpec:
    return DistributionSpec(
        scale=MeasurementScale.wrap(log_of(), p["beta"]),
        lam=p["lam"] * p["beta"],
        support=_POSITIVE,
    )


@catalog.register(
    "frechet_weibull",
    parameters={"lam": None, "beta": None},
    domain=_positive("lam", "beta"),
    closed_forms={
        "weibull": y ** (beta - 1) * sp.exp(-lam * y ** beta),
        "frechet": y ** (-beta - 1) * sp.exp(-lam * y ** (-beta)),
    },
    base="Log, exponential wrap, m_y = |T'|",
    notes="'weibull' uses w = log y; 'frechet' uses w = -log y, the law of maxima "
          "from power-law tails. Rayleigh with beta = 2.",
    verify=({"lam": 1.0, "beta": 2.0}, {"lam": 0.5, "beta": 0.7}, {"lam": 3.0, "beta": 3.5}),
)
def frechet_weibull(p: Params, orientation: Optional[str]) -> DistributionSpec:
    base = log_of() if orientation == "weibull" else combine((-1.0, log_of()))
    return DistributionSpec(
        scale=MeasurementScale.wrap(base, p["beta"]),
        lam=p["lam"] * p["beta"],
        measure=MeasureAdjustment.scale_derivative(),
        support=_POSITIVE,
    )


@catalog.register(
    "pareto_i",
    parameters={"lam": None, "c1": 1.0},
    domain={"lam > 1": lambda p: p["lam"] > 1.0, "c1 > 0": lambda p: p["c1"] > 0.0},
    closed_forms={"default": y ** (-lam)},
    base="Log, beta -> 0",
    notes="Pareto type I on (c1, inf).",
    verify=({"lam": 2.0}, {"lam": 3.5, "c1": 2.0}, {"lam": 1.5, "c1": 0.5}),
)
def pareto_i(p: Params, orientation: Optional[str]) -> DistributionSpec:
    return DistributionSpec(
        scale=MeasurementScale.affine(log_of()),
        lam=p["lam"],
        support=Interval(lo=p["c1"], hi=math.inf),
    )


@catalog.register(
    "log_frechet",
    parameters={"lam": None, "beta": None},
    domain=_positive("lam", "beta"),
    closed_forms={"default": (sp.log(y) ** (beta - 1) / y) * sp.exp(-lam * sp.log(y) ** beta)},
    base="Log^(2), exponential wrap, m_y = |T'|",
    notes="Frechet-type form on the log scale, support (1, inf).",
    verify=({"lam": 1.0, "beta": 2.0}, {"lam": 0.5, "beta": 1.0}, {"lam": 2.0, "beta": 3.0}),
)
def log_frechet(p: Params, orientation: Optional[str]) -> DistributionSpec:
    return DistributionSpec(
        scale=MeasurementScale.wrap(log_of(log_of()), p["beta"]),
        lam=p["lam"] * p["beta"],
        measure=MeasureAdjustment.scale_derivative(),
        support=Interval(lo=1.0, hi=math.inf),
    )


@catalog.register(
    "log2_stretched",
    parameters={"lam": None, "beta": None},
    domain={"lam > 0": lambda p: p["lam"] > 0.0, "beta > 1": lambda p: p["beta"] > 1.0},
    closed_forms={"default": sp.exp(-lam * sp.log(y) ** beta)},
    base="Log^(2), exponential wrap",
    notes="Unnamed; stretched exponential with f_y = log y, support (1, inf).",
    verify=({"lam": 1.0, "beta": 2.0}, {"lam": 0.5, "beta": 3.0}, {"lam": 2.0, "beta": 1.5}),
)
def log2_stretched(p: Params, orientation: Optional[str]) -> DistributionSpec:
    return DistributionSpec(
        scale=MeasurementScale.wrap(log_of(log_of()), p["beta"]),
        lam=p["lam"] * p["beta"],
        support=Interval(lo=1.0, hi=math.inf),
    )


@catalog.register(
    "log_pareto_i",
    parameters={"lam": None, "c1": math.e},
    domain={"lam > 1": lambda p: p["lam"] > 1.0, "c1 > 1": lambda p: p["c1"] > 1.0},
    closed_forms={"default": sp.log(y) ** (-lam) / y},
    base="Log^(2), beta -> 0; Pareto I under y -> log y, m_y = 1/y",
    notes="Log-Pareto type I on (c1, inf).",
    verify=({"lam": 2.5}, {"lam": 3.0, "c1": 5.0}, {"lam": 5.0, "c1": 1.5}),
)
def log_pareto_i(p: Params, orientation: Optional[str]) -> DistributionSpec:
    return DistributionSpec(
        scale=MeasurementScale.affine(log_of()),
        lam=p["lam"],
        measure=MeasureAdjustment.change_of_variable(log_of()),
        support=Interval(lo=p["c1"], hi=math.inf),
    )


@catalog.register(
    "log2_pareto",
    parameters={"lam": None, "c1": math.e, "c2": 100.0},
    domain={
        "lam > 0": lambda p: p["lam"] > 0.0,
        "c1 > 1": lambda p: p["c1"] > 1.0,
        "c2 > c1": lambda p: p["c2"] > p["c1"],
    },
    closed_forms={"default": sp.log(y) ** (-lam)},
    base="Log^(2), beta -> 0",
    notes="Unnamed; Pareto I with f_y = log y. Not integrable on (c1, inf) for any lambda, "
          "so the support is bounded to (c1, c2).",
    verify=({"lam": 1.0}, {"lam": 3.0, "c2": 1e4}, {"lam": 0.5, "c1": 2.0, "c2": 10.0}),
)
def log2_pareto(p: Params, orientation: Optional[str]) -> DistributionSpec:
    return DistributionSpec(
        scale=MeasurementScale.affine(log_of(log_of())),
        lam=p["lam"],
        support=Interval(lo=p["c1"], hi=p["c2"]),
    )


@catalog.register(
    "lomax",
    parameters={"k": None, "alpha": 1.0},
    domain={"k > 1": lambda p: p["k"] > 1.0, "alpha > 0": lambda p: p["alpha"] > 0.0},
    closed_forms={"default": (1 + y / alpha) ** (-k)},
    base="LinLog, beta -> 0: w = log(1 + y/alpha)",
    notes="Pareto type II. Exponential with rate k/alpha as alpha -> inf; tail y^-k.",
    verify=({"k": 2.0, "alpha": 1.0}, {"k": 3.0, "alpha": 2.0}, {"k": 1.5, "alpha": 0.5}),
)
def lomax(p: Params, orientation: Optional[str]) -> DistributionSpec:
    return DistributionSpec(
        scale=MeasurementScale.affine(log_of(combine((1.0 / p["alpha"], Linear())), c=1.0)),
        lam=p["k"],
        support=_POSITIVE,
    )


@catalog.register(
    "generalized_students",
    parameters={"k": None, "alpha": 1.0},
    domain={"k > 1/2": lambda p: p["k"] > 0.5, "alpha > 0": lambda p: p["alpha"] > 0.0},
    closed_forms={"default": (1 + y ** 2 / alpha) ** (-k)},
    base="LinLog, beta -> 0, f_y = y^2",
    notes="Pearson VII. Cauchy at k = alpha = 1; Gaussian as alpha -> inf with k/alpha fixed; tail |y|^(-2k).",
    verify=({"k": 1.0, "alpha": 1.0}, {"k": 2.5, "alpha": 3.0}, {"k": 0.75, "alpha": 0.5}),
)
def generalized_students(p: Params, orientation: Optional[str]) -> DistributionSpec:
    return DistributionSpec(
        scale=MeasurementScale.affine(log_of(combine((1.0 / p["alpha"], Linear())), c=1.0)),
        observable=ObservableMap.squared_deviation(0.0),
        lam=p["k"],
        support=_REAL,
    )


@catalog.register(
    "linlog2",
    parameters={"lam": None, "c1": math.e, "y_max": 100.0},
    domain={
        "lam > 0": lambda p: p["lam"] > 0.0,
        "c1 > 1": lambda p: p["c1"] > 1.0,
        "y_max > 0": lambda p: p["y_max"] > 0.0,
    },
    closed_forms={"default": sp.log(c1 + y) ** (-lam)},
    base="LinLog^(2) with c2 = 0: w = log(log(c1 + y))",
    notes="Unnamed. Decays slower than any power, so the support is bounded to (0, y_max).",
    verify=({"lam": 1.0}, {"lam": 2.0, "c1": 2.0}, {"lam": 0.5, "y_max": 1e3}),
)
def linlog2(p: Params, orientation: Optional[str]) -> DistributionSpec:
    return DistributionSpec(
        scale=MeasurementScale.affine(log_of(log_of(c=p["c1"]))),
        lam=p["lam"],
        support=Interval(lo=0.0, hi=p["y_max"]),
    )


def _log_linear(k_value: float, alpha_value: float) -> Tuple[MeasurementScale, float]:
    """Scale and multiplier for x^{k-1} e^{-alpha x} on the observable x."""
    if k_value == 1.0:
        return MeasurementScale.affine(), alpha_value
    ratio = alpha_value / (k_value - 1.0)
    return MeasurementScale.affine(combine((-1.0, log_of()), (ratio, Linear()))), k_value - 1.0


_GAMMA_DOMAIN = _positive("k", "alpha")


@catalog.register(
    "gamma",
    parameters={"k": None, "alpha": 1.0},
    domain=_GAMMA_DOMAIN,
    closed_forms={"default": y ** (k - 1) * sp.exp(-alpha * y)},
    base="LogLin, beta -> 0: w = -log y + (alpha/(k-1)) y, lambda = k - 1",
    notes="Pearson III. Tabulated as y^(-lambda) e^(-c1 lambda y) with lambda = 1 - k; "
          "k = 1 is the exponential with rate alpha.",
    verify=({"k": 2.0, "alpha": 1.0}, {"k": 1.0, "alpha": 2.0}, {"k": 0.5, "alpha": 2.0}, {"k": 3.5, "alpha": 0.7}),
)
def gamma_distribution(p: Params, orientation: Optional[str]) -> DistributionSpec:
    scale, multiplier = _log_linear(p["k"], p["alpha"])
    return DistributionSpec(scale=scale, lam=multiplier, support=_POSITIVE)


@catalog.register(
    "gamma_gauss",
    parameters={"k": None, "alpha": 1.0},
    domain=_GAMMA_DOMAIN,
    closed_forms={"default": y ** (k - 1) * sp.exp(-alpha * y ** 2)},
    base="LogLin, beta -> 0, f_y = y^2: w = -(1/2) log f + (alpha/(k-1)) f",
    notes="Rayleigh at k = 2.",
    verify=({"k": 2.0, "alpha": 1.0}, {"k": 1.0, "alpha": 0.5}, {"k": 4.0, "alpha": 2.0}),
)
def gamma_gauss(p: Params, orientation: Optional[str]) -> DistributionSpec:
    if p["k"] == 1.0:
        scale, multiplier = MeasurementScale.affine(), p["alpha"]
    else:
        ratio = p["alpha"] / (p["k"] - 1.0)
        scale = MeasurementScale.affine(combine((-0.5, log_of()), (ratio, Linear())))
        multiplier = p["k"] - 1.0
    return DistributionSpec(
        scale=scale,
        observable=ObservableMap.squared_deviation(0.0),
        lam=multiplier,
        support=_POSITIVE,
    )


@catalog.register(
    "generalized_gamma",
    parameters={"k": None, "alpha": 1.0, "gamma": None},
    domain=_positive("k", "alpha", "gamma"),
    closed_forms={"default": y ** (gamma * k - 1) * sp.exp(-alpha * y ** gamma)},
    base="LogLin, beta -> 0, under y -> y^gamma with m_y = gamma y^(gamma-1)",
    notes="Chi at gamma = 2, alpha = 1/2; Weibull at k = 1.",
    verify=({"k": 2.0, "alpha": 1.0, "gamma": 2.0}, {"k": 0.7, "alpha": 1.5, "gamma": 0.5}, {"k": 3.0, "alpha": 0.5, "gamma": 1.5}),
)
def generalized_gamma(p: Params, orientation: Optional[str]) -> DistributionSpec:
    scale, multiplier = _log_linear(p["k"], p["alpha"])
    power = ExpDeform(beta=p["gamma"], inner=log_of())
    return DistributionSpec(
        scale=scale,
        lam=multiplier,
        measure=MeasureAdjustment.change_of_variable(power),
        support=_POSITIVE,
    )


@catalog.register(
    "exponential_gamma",
    parameters={"k": None, "alpha": 1.0},
    domain=_GAMMA_DOMAIN,
    closed_forms={"default": sp.exp(k * y - alpha * sp.exp(y))},
    base="LogLin, beta -> 0, under y -> e^y with m_y = e^y",
    notes="Gamma on the exponential scale; the log of a gamma variable.",
    verify=({"k": 2.0, "alpha": 1.0}, {"k": 0.5, "alpha": 3.0}, {"k": 5.0, "alpha": 0.5}),
)
def exponential_gamma(p: Params, orientation: Optional[str]) -> DistributionSpec:
    scale, multiplier = _log_linear(p["k"], p["alpha"])
    return DistributionSpec(
        scale=scale,
        lam=multiplier,
        measure=MeasureAdjustment.change_of_variable(ExpDeform(beta=1.0)),
        support=_REAL,
    )


@catalog.register(
    "chi_square",
    parameters={"nu": None},
    domain=_positive("nu"),
    closed_forms={"default": y ** (nu / 2 - 1) * sp.exp(-y / 2)},
    base="LogLin, beta -> 0 (gamma with k = nu/2, alpha = 1/2)",
    notes="Special case of gamma.",
    verify=({"nu": 4.0}, {"nu": 1.0}, {"nu": 10.0}),
)
def chi_square(p: Params, orientation: Optional[str]) -> DistributionSpec:
    scale, multiplier = _log_linear(p["nu"] / 2.0, 0.5)
    return DistributionSpec(scale=scale, lam=multiplier, support=_POSITIVE)


@catalog.register(
    "beta",
    parameters={"lam": None, "b": 1.0, "c1": 0.0, "c2": 1.0},
    domain={
        "lam < 1": lambda p: p["lam"] < 1.0,
        "b * lam < 1": lambda p: p["b"] * p["lam"] < 1.0,
        "c1 < c2": lambda p: p["c1"] < p["c2"],
    },
    closed_forms={"default": (c2 - y) ** (-lam) * (y - c1) ** (-b * lam)},
    base="LogLinLog, beta -> 0: w = log(c2 - y) + b log(y - c1)",
    notes="Pearson I on (c1, c2); both endpoint exponents must exceed -1.",
    verify=({"lam": -1.0, "b": 1.0}, {"lam": 0.5, "b": -2.0}, {"lam": -3.0, "b": 0.5, "c1": -1.0, "c2": 2.0}),
)
def beta_distribution(p: Params, orientation: Optional[str]) -> DistributionSpec:
    upper = log_of(combine((-1.0, Linear()), offset=p["c2"]))
    lower = log_of(combine((1.0, Linear()), offset=-p["c1"]))
    return DistributionSpec(
        scale=MeasurementScale.affine(combine((1.0, upper), (p["b"], lower))),
        lam=p["lam"],
        support=Interval(lo=p["c1"], hi=p["c2"]),
    )


@catalog.register(
    "beta_prime",
    parameters={"lam": None, "b": 1.0},
    domain={"lam < 1": lambda p: p["lam"] < 1.0, "b * lam < 1": lambda p: p["b"] * p["lam"] < 1.0},
    closed_forms={"default": y ** (-b * lam) * (1 + y) ** ((b + 1) * lam - 2)},
    base="LogLinLog, beta -> 0: w = b lam log y + (2 - (b+1) lam) log(1 + y), internal lambda = 1",
    notes="Pearson VI / F; beta under y -> y/(1+y).",
    verify=({"lam": -1.0, "b": 1.0}, {"lam": 0.5, "b": -1.0}, {"lam": -0.5, "b": 1.5}),
)
def beta_prime(p: Params, orientation: Optional[str]) -> DistributionSpec:
    base = combine(
        (p["b"] * p["lam"], log_of()),
        (2.0 - (p["b"] + 1.0) * p["lam"], log_of(c=1.0)),
    )
    return DistributionSpec(scale=MeasurementScale.affine(base), lam=1.0, support=_POSITIVE)


@catalog.register(
    "gamma_variant",
    parameters={"lam": None, "b": 1.0, "c1": 1.0, "c2": 1.0},
    domain=_positive("lam", "c1", "c2"),
    closed_forms={"default": (c1 + y) ** (-b * lam) * sp.exp(-c2 * lam * y)},
    base="LinLogLin, beta -> 0: w = b log(c1 + y) + c2 y",
    notes="Linear at small and large magnitudes with a log regime between.",
    verify=({"lam": 1.0}, {"lam": 2.0, "b": -1.5, "c1": 0.5}, {"lam": 0.5, "b": 3.0, "c2": 4.0}),
)
def gamma_variant(p: Params, orientation: Optional[str]) -> DistributionSpec:
    base = combine((p["b"], log_of(c=p["c1"])), (p["c2"], Linear()))
    return DistributionSpec(scale=MeasurementScale.affine(base), lam=p["lam"], support=_POSITIVE)
