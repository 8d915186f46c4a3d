"""Scale changes and integral transforms of tabulated densities."""

from __future__ import annotations

import math
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy import fft
from scipy.integrate import quad_vec, simpson
from scipy.optimize import newton
from scipy.special import zeta

from core.logger import ScalekitLogger
from scalekit import quadrature
from scalekit.exceptions import (
    DomainError,
    GridTooNarrow,
    InvalidSpec,
    NonMonotoneMap,
    RingingExceedsTolerance,
)
from scalekit.maxent_engine import probe_spec
from scalekit.models import (
    DistributionSpec,
    GridDistribution,
    MeasureAdjustment,
    TailScale,
    TransformKernel,
    VariableChange,
)
from scalekit.scale_algebra import evaluate_base

logger = ScalekitLogger.get_logger()

RENORMALIZATION_DRIFT: float = 1e-6
REFINEMENT: int = 8
MIX_POINTS: int = 1024
MIX_DYNAMIC_RANGE: float = 1e6
FFT_POINTS: int = 1 << 16
FFT_SPAN: float = 400.0
BOUNDARY_DECAY: float = 1e-16
RINGING_CLIP: float = 1e-12
RINGING_LIMIT: float = 1e-9


def _refine(grid: np.ndarray, density: np.ndarray, factor: int = REFINEMENT) -> Tuple[np.ndarray, np.ndarray]:
    """Insert ``factor - 1`` points in every interval, interpolating linearly.

    Original nodes land on even indices so Simpson panels never straddle them.
    """
    steps = np.linspace(0.0, 1.0, factor + 1)[:-1]
    fine = (grid[:-1, None] + np.diff(grid)[:, None] * steps[None, :]).ravel()
    fine = np.append(fine, grid[-1])
    return fine, np.interp(fine, grid, density)


# Change of variable


def _map_values(g, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    with np.errstate(all="ignore"):
        return evaluate_base(g, y)


def _invert(g, targets: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Solve g(y) = x for every target by bracketing, bisection and a Newton polish."""
    probe = quadrature.ladder(lo, hi)
    values, slopes = _map_values(g, probe)
    signs = np.sign(slopes[np.isfinite(slopes) & (slopes != 0.0)])
    if signs.size == 0 or np.any(signs != signs[0]):
        raise NonMonotoneMap("map is not strictly monotone on the support", {"support": [lo, hi]})
    if signs[0] < 0:
        probe, values = probe[::-1], values[::-1]

    usable = np.isfinite(values)
    probe, values = probe[usable], values[usable]
    if np.any(targets < values[0]) or np.any(targets > values[-1]):
        raise DomainError(
            "source grid is not inside the image of the map",
            {"image": [float(values[0]), float(values[-1])], "grid": [float(targets.min()), float(targets.max())]},
        )

    right = np.clip(np.searchsorted(values, targets), 1, values.size - 1)
    a, b = probe[right - 1].copy(), probe[right].copy()
    for _ in range(64):
        mid = 0.5 * (a + b)
        below = _map_values(g, mid)[0] < targets
        a, b = np.where(below, mid, a), np.where(below, b, mid)
    guess = 0.5 * (a + b)

    roots = newton(
        lambda v: _map_values(g, v)[0] - targets,
        guess,
        fprime=lambda v: _map_values(g, v)[1],
        tol=1e-300,
        rtol=1e-14,
        maxiter=8,
        disp=False,
    )
    roots = np.where(np.isfinite(roots), roots, guess)
    residual = np.abs(_map_values(g, roots)[0] - targets)
    if np.any(residual > 1e-9 * np.maximum(1.0, np.abs(targets))):
        raise DomainError("could not invert the map at every grid point", {"max_residual": float(residual.max())})
    return roots


def change_of_variable(source: GridDistribution, change: VariableChange) -> GridDistribution:
    """Carry a density on the dissipation axis x to the observation axis y.

    p_y(y) = |g'(y)| p_x(g(y)), evaluated at y = g⁻¹(x) for every source
    grid point, then renormalized by Simpson's rule.

    Raises:
        NonMonotoneMap: g changes direction on the support.
        DomainError: the source grid is outside the image of g, or
            renormalization drifts by more than 1e-6.
    """
    lo, hi = change.support.as_tuple()
    y = _invert(change.g, source.grid, lo, hi)
    _, slope = _map_values(change.g, y)
    density = np.abs(slope) * source.density

    order = np.argsort(y)
    y, density = y[order], density[order]
    keep = np.concatenate([[True], np.diff(y) > 0])
    y, density = y[keep], density[keep]
    if np.any(y <= lo) or np.any(y >= hi):
        raise DomainError("mapped grid leaves the target support", {"support": [lo, hi]})

    mass = float(simpson(density, x=y))
    drift = abs(mass - 1.0)
    if drift > RENORMALIZATION_DRIFT:
        raise DomainError("renormalization drift is too large", {"drift": drift, "limit": RENORMALIZATION_DRIFT})

    spec: Optional[DistributionSpec] = None
    if source.spec is not None and source.spec.measure.kind == "unit":
        spec = source.spec.model_copy(
            update={"measure": MeasureAdjustment.change_of_variable(change.g), "support": change.support}
        )
    logger.debug("Changed variable", extra={"points": int(y.size), "drift": drift})
    return GridDistribution(
        grid=y,
        density=density / mass,
        normalization_constant=source.normalization_constant / mass,
        quadrature_error=source.quadrature_error + drift,
        spec=spec,
    )


# Extreme values


def extreme_value_density(tail: TailScale, lam: float) -> DistributionSpec:
    """p_y ∝ |T'| e^{-λT} for an upper-tail scale T.

    For a wrapped tail (1/β)(e^{βw} - 1) the internal multiplier is λβ,
    so the density reads |T'| e^{-λ e^{βw}}.

    Raises:
        DivergentIntegral: the resulting density is not normalizable.
    """
    scale = tail.scale
    multiplier = lam * scale.beta if scale.mode == "exponential_wrap" else lam
    spec = DistributionSpec(
        scale=scale,
        observable=tail.observable,
        lam=multiplier,
        measure=MeasureAdjustment.scale_derivative(),
        support=tail.support,
    )
    u, envelope = probe_spec(spec)
    quadrature.integrate(u, envelope)
    return spec


# Laplace transform


def laplace_transform(source: GridDistribution, dual_points: Iterable[float]) -> np.ndarray:
    """h*(s) = ∫ e^{-x s} p_x dx at every dual point s ≥ 0.

    When the source still knows its generating spec the exact density is
    integrated adaptively; otherwise the tabulated density is interpolated
    linearly and integrated by Simpson's rule.
    """
    s = np.asarray(list(dual_points), dtype=float)
    if np.any(s < 0) or not np.all(np.isfinite(s)):
        raise DomainError("Laplace dual points must be finite and nonnegative")
    if source.grid[0] < 0:
        raise DomainError("Laplace transform needs a source supported on x >= 0", {"grid_start": float(source.grid[0])})

    spec = source.spec
    if spec is not None and spec.support.lo >= 0:
        u, envelope = probe_spec(spec)
        psi = source.normalization_constant
        values = []
        for point in s:
            marks = [m / point for m in (1.0, 10.0, 40.0)] if point > 0 else []

            def kernel(x: np.ndarray, point: float = point) -> np.ndarray:
                return np.exp(-point * x) * u(x)

            values.append(psi * quadrature.integrate(kernel, envelope, extra_points=marks).value)
        return np.asarray(values)

    fine, density = _refine(source.grid, source.density)
    return np.asarray([simpson(np.exp(-point * fine) * density, x=fine) for point in s])


# Superstatistics


def _mix_grid(parameter_dist: GridDistribution, n_points: int) -> np.ndarray:
    median = parameter_dist.percentile(0.5)
    if not median > 0:
        raise DomainError("parameter distribution must put its mass on x > 0", {"median": median})
    unit = 1.0 / median
    return unit * np.sinh(np.linspace(0.0, math.asinh(MIX_DYNAMIC_RANGE), n_points))


def superstatistics_mix(
    kernel: TransformKernel,
    parameter_dist: GridDistribution,
    y_grid: Optional[Sequence[float]] = None,
    n_points: int = MIX_POINTS,
) -> GridDistribution:
    """Mix the normalized exponential x e^{-xy} over a parameter density h(x).

    The result ∫ x e^{-xy} h(x) dx is tabulated on an asinh-spaced grid
    reaching 10⁶ / median(x) unless *y_grid* is given.
    """
    if kernel.kind != "laplace":
        raise InvalidSpec("superstatistics mixing uses the Laplace kernel", {"kernel": kernel.kind})
    if parameter_dist.grid[0] < 0:
        raise DomainError("parameter distribution must live on x >= 0", {"grid_start": float(parameter_dist.grid[0])})
    y = np.asarray(y_grid, dtype=float) if y_grid is not None else _mix_grid(parameter_dist, n_points)
    if np.any(y < 0):
        raise DomainError("mixture grid must be nonnegative")

    spec = parameter_dist.spec
    if spec is not None and spec.support.lo >= 0:
        u, envelope = probe_spec(spec)
        psi = parameter_dist.normalization_constant

        def integrand(x: float) -> np.ndarray:
            weight = psi * float(quadrature.safe_eval(u, np.array([x]))[0])
            return x * np.exp(-x * y) * (weight if math.isfinite(weight) else 0.0)

        edges = np.concatenate([[envelope.core_lo], envelope.breakpoints, [envelope.core_hi]])
        mixed = np.zeros_like(y)
        for a, b in zip(edges[:-1], edges[1:]):
            mixed += quad_vec(integrand, a, b, epsabs=1e-14, epsrel=1e-12, norm="max")[0]
        if math.isinf(envelope.hi):
            mixed += quad_vec(integrand, envelope.core_hi, math.inf, epsabs=1e-14, epsrel=1e-12, norm="max")[0]
    else:
        fine, weights = _refine(parameter_dist.grid, parameter_dist.density)
        mixed = np.empty_like(y)
        for start in range(0, y.size, 64):
            block = y[start:start + 64, None]
            mixed[start:start + 64] = simpson(fine * np.exp(-fine * block) * weights, x=fine, axis=1)

    mass = float(simpson(mixed, x=y))
    if not mass > 0:
        raise DomainError("mixture has no mass on the grid", {"mass": mass})
    logger.debug("Mixed over parameter density", extra={"points": int(y.size), "mass": mass})
    return GridDistribution(
        grid=y,
        density=mixed / mass,
        normalization_constant=1.0 / mass,
        quadrature_error=abs(mass - 1.0),
    )


# Fourier inversion


def clip_ringing(density: np.ndarray) -> Tuple[np.ndarray, float]:
    """Zero negative lobes smaller than 1e-9 of the peak; larger lobes are an error.

    Returns the clipped density and the absolute mass removed.
    """
    peak = float(np.max(density))
    deepest = float(np.min(density))
    if deepest < -RINGING_LIMIT * peak:
        raise RingingExceedsTolerance(
            "negative lobes after Fourier inversion are too large",
            {"min_density": deepest, "peak": peak, "limit": RINGING_LIMIT},
        )
    negative = density < 0
    clipped = float(-np.sum(density[negative]))
    if deepest < -RINGING_CLIP * peak:
        logger.warning("Clipping Fourier ringing", extra={"min_density": deepest, "peak": peak})
    return np.where(negative, 0.0, density), clipped


def levy_stable_density(
    gamma: float,
    phi: float = 1.0,
    n_points: int = FFT_POINTS,
    span: float = FFT_SPAN,
) -> GridDistribution:
    """Symmetric stable density from its characteristic function e^{-φ|x|^γ}.

    The grid has ``n_points`` cells of width ``span / n_points`` covering
    [-span/2, span/2), so the defaults reach ±200; the first cell is dropped
    so the returned grid is symmetric.  The power-law tails that the discrete
    inversion folds back onto the grid are subtracted, and the mass beyond
    the grid ends is reported in ``quadrature_error`` rather than spread over
    the grid by renormalizing.

    Raises:
        InvalidSpec: γ outside (0, 2], φ ≤ 0, or n_points not a power of two.
        GridTooNarrow: e^{-φ|x|^γ} has not decayed below 1e-16 at the edge
            of the dual grid.
        RingingExceedsTolerance: see :func:`clip_ringing`.
    """
    if not 0.0 < gamma <= 2.0 or not phi > 0.0:
        raise InvalidSpec("levy density needs 0 < gamma <= 2 and phi > 0", {"gamma": gamma, "phi": phi})
    if n_points < 16 or n_points & (n_points - 1):
        raise InvalidSpec("n_points must be a power of two >= 16", {"n_points": n_points})

    dy = span / n_points
    dx = 2.0 * math.pi / (n_points * dy)
    offsets = np.arange(n_points) - n_points // 2
    y, x = offsets * dy, offsets * dx

    boundary = math.exp(-phi * (abs(x[0]) ** gamma))
    if boundary >= BOUNDARY_DECAY:
        raise GridTooNarrow(
            "characteristic function has not decayed at the edge of the dual grid",
            {"gamma": gamma, "phi": phi, "x_max": float(abs(x[0])), "value": boundary},
        )

    characteristic = np.exp(-phi * np.abs(x) ** gamma)
    density = (dx / (2.0 * math.pi)) * np.real(fft.fftshift(fft.fft(fft.ifftshift(characteristic))))

    y, density = y[1:], density[1:]
    density, clipped = clip_ringing(density - periodic_images(y, gamma, phi, span))
    outside = tail_mass(gamma, phi, span / 2.0)
    logger.debug(
        "Inverted characteristic function",
        extra={"gamma": gamma, "phi": phi, "outside": outside, "clipped": clipped * dy},
    )
    return GridDistribution(
        grid=y,
        density=density,
        normalization_constant=1.0,
        quadrature_error=clipped * dy + outside + n_points * np.finfo(float).eps,
    )


def tail_coefficient(gamma: float, phi: float) -> float:
    """C in p(y) ~ C |y|^(-1-γ) for large |y|; zero for the Gaussian."""
    if gamma == 2.0:
        return 0.0
    return phi * math.gamma(1.0 + gamma) * math.sin(math.pi * gamma / 2.0) / math.pi


def periodic_images(y: np.ndarray, gamma: float, phi: float, period: float) -> np.ndarray:
    """Σ_{n≠0} C |y + n·period|^(-1-γ), the tails a discrete inversion wraps onto [-period/2, period/2).

    The sum over images is a pair of Hurwitz zeta values.
    """
    c = tail_coefficient(gamma, phi)
    if c == 0.0:
        return np.zeros_like(y)
    s = 1.0 + gamma
    q = np.asarray(y, dtype=float) / period
    return c * period ** -s * (zeta(s, 1.0 + q) + zeta(s, 1.0 - q))


def tail_mass(gamma: float, phi: float, half_width: float) -> float:
    """Mass of the stable density beyond ±half_width, from its power-law tail."""
    return 2.0 * tail_coefficient(gamma, phi) / (gamma * half_width ** gamma)


def characteristic_function(dist: GridDistribution, x_points: Iterable[float]) -> np.ndarray:
    """∫ p(y) e^{ixy} dy by the trapezoid rule on the grid of *dist*.

    The table is read as a probability distribution in its own right, so the
    result is divided by the trapezoid mass of the grid and φ(0) = 1.
    """
    x = np.asarray(list(x_points), dtype=float)
    mass = dist.total_mass()
    if not mass > 0.0:
        raise DomainError("tabulated density has no mass", {"mass": mass})
    values = np.empty(x.size, dtype=complex)
    for start in range(0, x.size, 16):
        phase = x[start:start + 16, None] * dist.grid[None, :]
        values[start:start + 16] = (
            np.trapezoid(dist.density * np.cos(phase), dist.grid, axis=1)
            + 1j * np.trapezoid(dist.density * np.sin(phase), dist.grid, axis=1)
        )
    return values / mass


def apply_kernel(kernel: TransformKernel, dist: GridDistribution, dual_points: Iterable[float]) -> np.ndarray:
    """Dispatch to the Laplace or Fourier transform of *dist*."""
    if kernel.kind == "laplace":
        return laplace_transform(dist, dual_points)
    return characteristic_function(dist, dual_points)

