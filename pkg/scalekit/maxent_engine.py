"""Maximum-entropy densities p_y ∝ m_y e^{-λ T_f} and their multipliers.

:func:`normalize` turns a :class:`DistributionSpec` into a tabulated
:class:`GridDistribution`; :func:`solve_lambda` picks λ so that the mean of
T_f hits a target; :func:`discrete_maxent_oracle` solves the finite problem
through its convex dual as an independent check on the exponential form.
"""

from __future__ import annotations

import math
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np
from scipy.integrate import simpson
from scipy.optimize import brentq, root_scalar
from scipy.special import entr, softmax

from core.logger import ScalekitLogger
from scalekit import quadrature
from scalekit.exceptions import DivergentIntegral, DomainError, InfeasibleConstraint, InvalidSpec, NoBracket
from scalekit.models import Constraint, DistributionSpec, GridDistribution
from scalekit.scale_algebra import evaluate_base, scale_and_slope

logger = ScalekitLogger.get_logger()

DEFAULT_GRID_POINTS: int = 4096
LAMBDA_RANGE: Tuple[float, float] = (1e-6, 1e6)
BRACKET_EXPANSIONS: int = 3
# e^{-x} is exactly zero in double precision beyond this.
EXP_UNDERFLOW: float = 745.2


# Unnormalized density


def scale_on_support(spec: DistributionSpec, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Return ``(T_f, log m_y)`` at observation points *y*.

    Under a change of variable the scale is read on the dissipation axis
    x = g(y) and the measure is |g'(y)|.
    """
    y = np.asarray(y, dtype=float)
    measure = spec.measure
    if measure.kind == "change_of_variable":
        x, dx = evaluate_base(measure.g, y)
        t, _ = scale_and_slope(spec.scale, spec.observable, x)
        with np.errstate(divide="ignore"):
            return t, np.log(np.abs(dx))
    t, slope = scale_and_slope(spec.scale, spec.observable, y)
    if measure.kind == "scale_derivative":
        with np.errstate(divide="ignore", invalid="ignore"):
            return t, np.log(np.abs(slope))
    return t, np.zeros_like(t)


def unnormalized_density(spec: DistributionSpec) -> Callable[[np.ndarray], np.ndarray]:
    """u(y) = m_y e^{-λ T_f(y)}, evaluated in log space.  λ must be bound."""
    if spec.lam is None:
        raise InvalidSpec("lambda is not set on this spec; call solve_lambda first")
    lam = spec.lam

    def u(y: np.ndarray) -> np.ndarray:
        t, log_m = scale_on_support(spec, y)
        with np.errstate(all="ignore"):
            damping = lam * t
            exponent = log_m - damping
            # An overflowed measure cannot outweigh e^{-λT} once that alone underflows.
            runaway = np.isnan(exponent) | (np.isposinf(exponent) & ~(damping < EXP_UNDERFLOW))
            return np.exp(np.where(runaway, -np.inf, exponent))

    return u


def _anchors(spec: DistributionSpec) -> List[float]:
    if spec.observable.kind == "squared_deviation" and spec.measure.kind != "change_of_variable":
        return [spec.observable.center]
    return []


def probe_spec(spec: DistributionSpec) -> Tuple[Callable[[np.ndarray], np.ndarray], quadrature.Envelope]:
    """Return u and its integration envelope."""
    u = unnormalized_density(spec)
    return u, quadrature.probe(u, spec.support.lo, spec.support.hi, _anchors(spec))


# Normalization


def normalize(spec: DistributionSpec, n_points: int = DEFAULT_GRID_POINTS) -> GridDistribution:
    """Tabulate the normalized density of *spec* on an adaptive grid.

    Raises:
        InvalidSpec: λ is unset.
        DivergentIntegral: u is not integrable over the support.
    """
    u, envelope = probe_spec(spec)
    integral = quadrature.integrate(u, envelope)
    if not integral.value > 0.0:
        raise DivergentIntegral("normalizing integral is not positive", {"value": integral.value})
    psi = 1.0 / integral.value

    grid = quadrature.place_grid(envelope, n_points)
    density = psi * quadrature.safe_eval(u, grid)
    if not np.all(np.isfinite(density)):
        raise DivergentIntegral("density is not finite on the grid", {"lam": spec.lam})

    # Mass outside the grid counts against the tabulation.
    unseen = integral.truncated + quadrature.edge_mass(u, envelope, float(grid[0]), float(grid[-1]))
    quadrature_error = psi * (integral.abserr + unseen) + quadrature.trapezoid_error(grid, density)

    logger.debug(
        "Normalized spec",
        extra={"lam": spec.lam, "psi": psi, "grid": [float(grid[0]), float(grid[-1])],
               "truncated": integral.truncated * psi, "quadrature_error": quadrature_error},
    )
    return GridDistribution(
        grid=grid, density=density, normalization_constant=psi,
        quadrature_error=quadrature_error, spec=spec,
    )


def mean_scale_value(spec: DistributionSpec) -> float:
    """E[T_f] under the normalized density of *spec*."""
    u, envelope = probe_spec(spec)

    def weighted(y: np.ndarray) -> np.ndarray:
        t, _ = scale_on_support(spec, y)
        return u(y) * t

    mass = quadrature.integrate(u, envelope).value
    if not mass > 0.0:
        raise DivergentIntegral("normalizing integral is not positive", {"value": mass})
    return quadrature.integrate(weighted, envelope).value / mass


# Multiplier search


def solve_lambda(template: DistributionSpec, constraint: Constraint) -> float:
    """Find λ with E[T_f] = target by bracketing on decades, then Brent's method.

    E[T_f] is strictly decreasing in λ.  Multipliers at which the density is
    not normalizable are skipped while bracketing.

    Raises:
        NoBracket: the target is not attained on [1e-6, 1e6], even after
            widening the range tenfold three times.
    """
    target = constraint.target_mean
    cache: Dict[float, float] = {}

    def excess(lam: float) -> float:
        if lam not in cache:
            cache[lam] = mean_scale_value(template.with_lambda(lam)) - target
        return cache[lam]

    lo_exp, hi_exp = (int(round(math.log10(bound))) for bound in LAMBDA_RANGE)
    bracket = None
    last_error: DivergentIntegral | None = None
    for expansion in range(BRACKET_EXPANSIONS + 1):
        ladder = [10.0 ** k for k in range(lo_exp - expansion, hi_exp + expansion + 1)]
        finite: List[Tuple[float, float]] = []
        for lam in ladder:
            try:
                finite.append((lam, excess(lam)))
            except DivergentIntegral as exc:
                last_error = exc
        for (a, fa), (b, fb) in zip(finite, finite[1:]):
            if fa == 0.0:
                return a
            if fa * fb < 0.0:
                bracket = (a, b)
                break
        if bracket is not None:
            break
        logger.debug("Widening lambda search", extra={"expansion": expansion + 1, "target": target})

    if bracket is None:
        if not cache and last_error is not None:
            raise last_error
        raise NoBracket(
            "target mean is not attained on the searched lambda range",
            {"target_mean": target, "lambda_range": [10.0 ** (lo_exp - BRACKET_EXPANSIONS),
                                                     10.0 ** (hi_exp + BRACKET_EXPANSIONS)]},
        )

    lam = brentq(excess, *bracket, xtol=1e-14, rtol=1e-12)
    residual = abs(excess(lam))
    if residual > constraint.tolerance:
        logger.warning(
            "Lambda solve residual above tolerance",
            extra={"lambda": lam, "residual": residual, "tolerance": constraint.tolerance},
        )
    logger.info("Solved lambda", extra={"lambda": lam, "bracket": list(bracket), "target": target})
    return float(lam)


# Information measures


def entropy(dist: GridDistribution) -> float:
    """-∫ p log p dy by Simpson's rule on the grid."""
    return float(simpson(entr(dist.density), x=dist.grid))


def surprise_profile(dist: GridDistribution, spec: DistributionSpec) -> List[Tuple[float, float]]:
    """Pairs ``(T_f(y), -log p_y)`` at every grid point.

    For a unit measure these lie on a line with slope λ and intercept -log ψ.
    """
    if spec.measure.kind != "unit":
        raise InvalidSpec("surprise is linear in T_f only for a unit measure", {"measure": spec.measure.kind})
    if np.any(dist.density <= 0.0):
        zero_at = float(dist.grid[np.argmin(dist.density)])
        raise DomainError("density vanishes on the grid; surprise is infinite", {"y": zero_at})
    t, _ = scale_and_slope(spec.scale, spec.observable, dist.grid)
    return list(zip(np.asarray(t, dtype=float).tolist(), (-np.log(dist.density)).tolist()))


# Discrete oracle


def discrete_maxent_oracle(t_values: Sequence[float], target_mean: float) -> List[float]:
    """Maximize -Σ p log p subject to Σ p = 1 and Σ p T = target.

    Solved as the one-dimensional convex dual: Newton's method on the
    multiplier with the variance of T as the derivative, and Brent's method
    as a fallback.

    Raises:
        InfeasibleConstraint: target is not strictly inside (min T, max T).
    """
    t = np.asarray(list(t_values), dtype=float)
    if t.size == 0 or not np.all(np.isfinite(t)):
        raise InfeasibleConstraint("T values must be a non-empty list of finite numbers")
    if not t.min() < target_mean < t.max():
        raise InfeasibleConstraint(
            "target mean lies outside the open hull of the T values",
            {"target_mean": target_mean, "min": float(t.min()), "max": float(t.max())},
        )

    spread = float(np.ptp(t))
    centred = (t - t.mean()) / spread
    goal = (target_mean - t.mean()) / spread

    def gap(lam: float) -> float:
        p = softmax(-lam * centred)
        return float(p @ centred) - goal

    def slope(lam: float) -> float:
        p = softmax(-lam * centred)
        mean = p @ centred
        return -float(p @ (centred - mean) ** 2)

    try:
        result = root_scalar(gap, x0=0.0, fprime=slope, method="newton", xtol=1e-15, maxiter=100)
        lam = result.root if result.converged else math.nan
    except (RuntimeError, OverflowError):
        lam = math.nan
    if not (math.isfinite(lam) and abs(gap(lam)) < 1e-14):
        width = 1.0
        while gap(-width) * gap(width) > 0.0:
            width *= 2.0
        lam = brentq(gap, -width, width, xtol=1e-15, rtol=4 * np.finfo(float).eps)

    p = softmax(-lam * centred)
    p = p / p.sum()
    return p.tolist()
