"""Adaptive integration of unnormalized densities over open supports.

A density is first *probed*: a ladder of points spanning the support (down
to 1e-15 and out to 1e300 for infinite ends) locates the peak, the region
where u stays above 1e-16 of that peak, and the tail behaviour; the ladder
is cut where u has decayed to zero.  A dense
probe in an ``asinh`` coordinate centred on the peak then yields a CDF
estimate whose quantiles split the core into panels for
:func:`scipy.integrate.quad`.  Semi-infinite tails beyond the core are
integrated after the substitution y = b ± (e^s − 1).  Every abscissa is
kept strictly inside the support.  Output grids follow |u''|^(1/3), the point
density under which the trapezoid rule makes the same error in every cell.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid, quad
from scipy.optimize import brentq

from core.logger import ScalekitLogger
from scalekit.exceptions import DivergentIntegral, DomainError

logger = ScalekitLogger.get_logger()

Density = Callable[[np.ndarray], np.ndarray]

TRUNCATION_RATIO: float = 1e-16
PROBE_POINTS: int = 1 << 15
PANEL_COUNT: int = 32
UNIFORM_BLEND: float = 0.1
CURVATURE_SHARE: float = 0.8
QUAD_EPSREL: float = 1e-12
QUAD_LIMIT: int = 200

# Quarter-decade offsets used to walk towards infinite ends.
_DECADES: np.ndarray = np.logspace(-15.0, 300.0, 4 * 315 + 1)
_FINITE_FRACTIONS: np.ndarray = np.concatenate([
    np.logspace(-15.0, -1.0, 57),
    np.linspace(0.1, 0.9, 161)[1:-1],
    1.0 - np.logspace(-1.0, -15.0, 57),
])


@dataclasses.dataclass(frozen=True, slots=True)
class Envelope:
    """Where an unnormalized density lives, as found by probing."""

    lo: float
    hi: float
    core_lo: float
    core_hi: float
    mode: float
    peak: float
    width: float
    probe: np.ndarray
    blend: np.ndarray
    placement: np.ndarray
    breakpoints: np.ndarray
    mass_estimate: float


@dataclasses.dataclass(frozen=True, slots=True)
class Integral:
    value: float
    abserr: float
    truncated: float


def safe_eval(u: Density, y: np.ndarray) -> np.ndarray:
    """Evaluate *u* with floating-point warnings silenced and NaN mapped to 0.

    Points outside the domain of the scale count as zero density.
    """
    y = np.asarray(y, dtype=float)
    with np.errstate(all="ignore"):
        try:
            values = np.asarray(u(y), dtype=float)
        except DomainError:
            if y.size == 1:
                return np.zeros_like(y)
            values = np.array([safe_eval(u, point.reshape(1))[0] for point in y.ravel()]).reshape(y.shape)
    return np.where(np.isnan(values), 0.0, values)


def inside(y: float, lo: float, hi: float) -> float:
    """Pull *y* into the open interval (lo, hi)."""
    if y <= lo:
        return float(np.nextafter(lo, math.inf))
    if y >= hi:
        return float(np.nextafter(hi, -math.inf))
    return y


def _scalar(f: Density, y: float) -> float:
    value = float(safe_eval(f, np.array([y]))[0])
    return value if math.isfinite(value) else 0.0


def ladder(lo: float, hi: float, anchors: Sequence[float] = ()) -> np.ndarray:
    """Probe points: quarter decades towards infinite ends, graded fractions of finite spans."""
    if math.isfinite(lo) and math.isfinite(hi):
        points = lo + (hi - lo) * _FINITE_FRACTIONS
    elif math.isfinite(lo):
        points = lo + _DECADES
    elif math.isfinite(hi):
        points = hi - _DECADES[::-1]
    else:
        points = np.concatenate([-_DECADES[::-1], [0.0], _DECADES])
    points = np.concatenate([points, np.asarray(anchors, dtype=float)])
    points = points[np.isfinite(points) & (points > lo) & (points < hi)]
    return np.unique(points)


def _check_tails(points: np.ndarray, values: np.ndarray, lo: float, hi: float) -> None:
    """Reject densities whose log-log slope shows a non-integrable end."""

    def slope(x0: float, x1: float, v0: float, v1: float) -> float:
        return (math.log(v1) - math.log(v0)) / (math.log(x1) - math.log(x0))

    positive = np.nonzero((values > 0) & np.isfinite(values))[0]
    if positive.size < 2:
        return
    first, second = positive[0], positive[1]
    last, before = positive[-1], positive[-2]

    if math.isinf(hi) and last == points.size - 1 and points[before] > 0:
        s = slope(points[before], points[last], values[before], values[last])
        if s > -1.0:
            raise DivergentIntegral("density decays no faster than 1/y at +infinity", {"tail_slope": s})
    if math.isinf(lo) and first == 0 and points[second] < 0:
        s = slope(-points[second], -points[first], values[second], values[first])
        if s > -1.0:
            raise DivergentIntegral("density decays no faster than 1/|y| at -infinity", {"tail_slope": s})
    if math.isfinite(lo) and first == 0:
        s = slope(points[first] - lo, points[second] - lo, values[first], values[second])
        if s <= -1.0 + 1e-9:
            raise DivergentIntegral("non-integrable singularity at the lower end", {"lo": lo, "slope": s})
    if math.isfinite(hi) and last == points.size - 1:
        s = slope(hi - points[last], hi - points[before], values[last], values[before])
        if s <= -1.0 + 1e-9:
            raise DivergentIntegral("non-integrable singularity at the upper end", {"hi": hi, "slope": s})


def _half_width(
    u: Density, mode: float, peak: float, points: np.ndarray, values: np.ndarray, lo: float, hi: float
) -> float:
    """Distance from the mode to where u first falls to half its peak."""
    target = math.log(peak / 2.0)
    widths = []
    for side in (-1.0, 1.0):
        beyond = points[(np.sign(points - mode) == side) & (values < peak / 2.0)]
        if beyond.size == 0:
            continue
        far = float(np.min(np.abs(beyond - mode)))

        def excess(d: float) -> float:
            value = _scalar(u, inside(mode + side * d, lo, hi))
            return math.log(value) - target if value > 0 else -math.inf

        try:
            widths.append(brentq(excess, 0.0, far, xtol=far * 1e-6 + 1e-300))
        except ValueError:
            widths.append(far)
    if not widths:
        return float(points[-1] - points[0]) / 10.0
    return max(min(widths), abs(mode) * 1e-15, 1e-300)


def _stop_at_underflow(values: np.ndarray) -> np.ndarray:
    """Zero the ladder beyond the first point where u has decayed to nothing on either side of the peak.

    Far-out values after that are overflow artefacts of the scale, not mass.
    """
    usable = np.isfinite(values) & (values > 0)
    if not np.any(usable):
        return values
    top = int(np.argmax(np.where(usable, values, -np.inf)))
    floor = TRUNCATION_RATIO * values[top]
    decayed = np.nonzero(values == 0.0)[0]
    values = values.copy()
    for index in decayed[decayed > top]:
        if 0.0 < values[index - 1] < floor:
            values[index:] = 0.0
            break
    for index in decayed[decayed < top][::-1]:
        if 0.0 < values[index + 1] < floor:
            values[:index + 1] = 0.0
            break
    return values


def _to_z(y: np.ndarray, mode: float, width: float) -> np.ndarray:
    d = np.asarray(y, dtype=float) - mode
    with np.errstate(all="ignore"):
        log_ratio = np.log(np.abs(d)) - math.log(width)
        far = np.sign(d) * (log_ratio + np.log1p(np.sqrt(1.0 + np.exp(-2.0 * log_ratio))))
        near = np.arcsinh(d / width)
    return np.where(log_ratio > 0, far, near)


def _from_z(z: np.ndarray, mode: float, width: float) -> np.ndarray:
    with np.errstate(all="ignore"):
        far = np.sign(z) * 0.5 * np.exp(np.abs(z) + math.log(width)) * -np.expm1(-2.0 * np.abs(z))
        near = width * np.sinh(z)
    return mode + np.where(np.abs(z) > 1.0, far, near)


def _placement(y: np.ndarray, values: np.ndarray, cdf: np.ndarray, blend: np.ndarray) -> np.ndarray:
    """Grid CDF weighted by |u''|^(1/3), which spreads trapezoid error evenly over the cells."""
    with np.errstate(all="ignore"):
        weight = np.cbrt(np.abs(np.gradient(np.gradient(values, y), y)))
    weight = np.where(np.isfinite(weight), weight, 0.0)
    curvature = cumulative_trapezoid(weight, y, initial=0.0)
    total = float(curvature[-1])
    if not (math.isfinite(total) and total > 0.0):
        return blend
    rest = 1.0 - CURVATURE_SHARE - UNIFORM_BLEND
    return (CURVATURE_SHARE * curvature / total + rest * cdf
            + UNIFORM_BLEND * np.linspace(0.0, 1.0, y.size))


def probe(u: Density, lo: float, hi: float, anchors: Sequence[float] = ()) -> Envelope:
    """Locate the mass of *u* on ``(lo, hi)`` and plan its integration."""
    points = ladder(lo, hi, anchors)
    values = _stop_at_underflow(safe_eval(u, points))
    finite = np.isfinite(values)
    if not np.any(finite & (values > 0)):
        raise DivergentIntegral("density vanishes on the probed support", {"lo": lo, "hi": hi})

    _check_tails(points, values, lo, hi)

    peak = float(np.max(values[finite]))
    mode = float(points[finite][np.argmax(values[finite])])
    above = np.nonzero(values >= TRUNCATION_RATIO * peak)[0]
    probe_lo = float(points[max(above[0] - 1, 0)])
    probe_hi = float(points[min(above[-1] + 1, points.size - 1)])
    width = _half_width(u, mode, peak, points, values, lo, hi)

    z = np.linspace(_to_z(probe_lo, mode, width), _to_z(probe_hi, mode, width), PROBE_POINTS)
    dense = _from_z(z, mode, width)
    dense = np.unique(dense[np.isfinite(dense) & (dense > lo) & (dense < hi)])
    dense_values = safe_eval(u, dense)
    dense_values = np.where(np.isfinite(dense_values), dense_values, peak)

    cdf = cumulative_trapezoid(dense_values, dense, initial=0.0)
    mass = float(cdf[-1])
    if not math.isfinite(mass) or mass <= 0.0:
        raise DivergentIntegral("probe mass is not finite and positive", {"mass": mass})
    blend = (1.0 - UNIFORM_BLEND) * cdf / mass + UNIFORM_BLEND * np.linspace(0.0, 1.0, dense.size)

    placement = _placement(dense, dense_values, cdf / mass, blend)

    core_lo = lo if math.isfinite(lo) else probe_lo
    core_hi = hi if math.isfinite(hi) else probe_hi
    quantiles = np.linspace(0.0, 1.0, PANEL_COUNT + 1)[1:-1]
    breakpoints = np.unique(np.concatenate([np.interp(quantiles, blend, dense), [mode]]))
    breakpoints = breakpoints[(breakpoints > core_lo) & (breakpoints < core_hi)]

    logger.debug(
        "Probed density",
        extra={"lo": lo, "hi": hi, "mode": mode, "peak": peak, "width": width,
               "core": [core_lo, core_hi], "panels": int(breakpoints.size + 1)},
    )
    return Envelope(
        lo=lo, hi=hi, core_lo=core_lo, core_hi=core_hi, mode=mode, peak=peak, width=width,
        probe=dense, blend=blend, placement=placement, breakpoints=breakpoints, mass_estimate=mass,
    )


def _quad(f: Callable[[float], float], a: float, b: float, epsabs: float) -> tuple[float, float]:
    result = quad(f, a, b, epsabs=epsabs, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT, full_output=1)
    value, abserr = float(result[0]), float(result[1])
    if len(result) > 3:
        message = str(result[3])
        if "divergent" in message.lower() or not math.isfinite(value):
            raise DivergentIntegral("adaptive quadrature did not converge", {"a": a, "b": b, "detail": message})
        logger.debug("Quadrature warning", extra={"a": a, "b": b, "detail": message, "abserr": abserr})
    return value, abserr


def integrate(f: Density, envelope: Envelope, extra_points: Sequence[float] = ()) -> Integral:
    """Integrate *f* over the support described by *envelope*.

    *f* may be the density itself or any function dominated by it (moments,
    L1 differences, kernels).  ``truncated`` is the part contributed by the
    semi-infinite tails outside the core.
    """
    epsabs = 1e-15 * envelope.mass_estimate
    edges = np.unique(np.concatenate([
        [envelope.core_lo, envelope.core_hi],
        envelope.breakpoints,
        np.asarray(extra_points, dtype=float),
    ]))
    edges = edges[(edges >= envelope.core_lo) & (edges <= envelope.core_hi)]

    def scalar(y: float) -> float:
        return _scalar(f, inside(y, envelope.lo, envelope.hi))

    total, abserr = 0.0, 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        value, err = _quad(scalar, float(a), float(b), epsabs)
        total += value
        abserr += err

    truncated = 0.0
    for anchor, direction, open_end in (
        (envelope.core_hi, 1.0, math.isinf(envelope.hi)),
        (envelope.core_lo, -1.0, math.isinf(envelope.lo)),
    ):
        if not open_end:
            continue

        def tail(s: float, anchor: float = anchor, direction: float = direction) -> float:
            with np.errstate(all="ignore"):
                y = anchor + direction * math.expm1(s) if s < 700.0 else direction * math.inf
            if not math.isfinite(y):
                return 0.0
            value = scalar(y) * math.exp(s)
            return value if math.isfinite(value) else 0.0

        value, err = _quad(tail, 0.0, math.inf, epsabs)
        truncated += value
        abserr += err

    total += truncated
    if not math.isfinite(total):
        raise DivergentIntegral("integral is not finite", {"value": total})
    return Integral(value=total, abserr=abserr, truncated=truncated)


def place_grid(envelope: Envelope, n_points: int) -> np.ndarray:
    """Place *n_points* by inverting the curvature-weighted probe CDF."""
    grid = np.interp(np.linspace(0.0, 1.0, n_points), envelope.placement, envelope.probe)
    return np.unique(grid)


def trapezoid_error(grid: np.ndarray, density: np.ndarray) -> float:
    """Richardson estimate of the trapezoid error on *grid*: |T(h) - T(2h)| / 3."""
    coarse = np.arange(0, grid.size, 2)
    if coarse[-1] != grid.size - 1:
        coarse = np.append(coarse, grid.size - 1)
    fine_mass = float(np.trapezoid(density, grid))
    coarse_mass = float(np.trapezoid(density[coarse], grid[coarse]))
    return abs(coarse_mass - fine_mass) / 3.0


def edge_mass(f: Density, envelope: Envelope, first: float, last: float) -> float:
    """Integral of *f* between finite support ends and the grid ends *first* and *last*."""
    epsabs = 1e-15 * envelope.mass_estimate

    def scalar(y: float) -> float:
        return _scalar(f, inside(y, envelope.lo, envelope.hi))

    total = 0.0
    if math.isfinite(envelope.lo) and first > envelope.lo:
        total += _quad(scalar, envelope.lo, first, epsabs)[0]
    if math.isfinite(envelope.hi) and last < envelope.hi:
        total += _quad(scalar, last, envelope.hi, epsabs)[0]
    return total
