"""Monte Carlo generative stories and their Kolmogorov-Smirnov verdicts.

Every scenario draws from ``numpy.random.Generator(PCG64(seed))``; the
generator identity and the seed fix the sample stream.  Gamma draws with
non-integer shape use numpy's Marsaglia-Tsang rejection sampler; Cauchy
draws use the inverse CDF tan(π(u - ½)); other symmetric stable laws use
the Chambers-Mallows-Stuck transform.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Callable, Dict, Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

import config
from core.logger import ScalekitLogger
from scalekit.catalog import instantiate
from scalekit.exceptions import InvalidSpec, UnknownScenario
from scalekit.maxent_engine import normalize
from scalekit.models import FitReport, GridDistribution, ProcessSpec, TransformKernel
from scalekit.transforms import superstatistics_mix

logger = ScalekitLogger.get_logger()

KS_CONSTANT: float = 1.63
MIN_SAMPLES: int = 1000
CHUNK_DRAWS: int = 1 << 22


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


# Parent laws for sample maxima, as frozen scipy distributions.
PARENTS: Dict[str, Callable[[Dict[str, float]], stats.rv_continuous]] = {
    "exponential": lambda p: stats.expon(scale=1.0 / p.get("lam", 1.0)),
    "pareto": lambda p: stats.pareto(b=p.get("alpha", 2.0)),
}


# Samplers


def _chunks(total: int, per_sample: int) -> Iterable[Tuple[int, int]]:
    step = max(1, CHUNK_DRAWS // max(per_sample, 1))
    for start in range(0, total, step):
        yield start, min(start + step, total)


def _waiting_time(spec: ProcessSpec, rng: np.random.Generator) -> np.ndarray:
    out = np.empty(spec.sample_count)
    for start, stop in _chunks(spec.sample_count, spec.k):
        out[start:stop] = rng.exponential(1.0 / spec.rate, size=(stop - start, spec.k)).sum(axis=1)
    return out


def _product(spec: ProcessSpec, rng: np.random.Generator) -> np.ndarray:
    out = np.empty(spec.sample_count)
    half_width = math.sqrt(3.0 * spec.log_variance)
    for start, stop in _chunks(spec.sample_count, spec.n):
        shape = (stop - start, spec.n)
        if spec.factor_law == "log_uniform":
            logs = rng.uniform(-half_width, half_width, size=shape)
        else:
            logs = rng.normal(0.0, math.sqrt(spec.log_variance), size=shape)
        out[start:stop] = np.exp(logs.sum(axis=1))
    return out


def _sample_maximum(spec: ProcessSpec, rng: np.random.Generator) -> np.ndarray:
    """Max of n parent draws via the order-statistic identity Q(U^{1/n})."""
    factory = PARENTS.get(spec.parent)
    if factory is None:
        raise InvalidSpec(f"unknown parent law {spec.parent!r}", {"accepted": sorted(PARENTS)})
    parent = factory(dict(spec.parent_params))
    upper_tail = -np.expm1(np.log(rng.random(spec.sample_count)) / spec.n)
    return parent.isf(upper_tail)


def _stable_draws(gamma: float, size: Tuple[int, ...], rng: np.random.Generator) -> np.ndarray:
    if gamma == 1.0:
        return np.tan(np.pi * (rng.random(size) - 0.5))
    angle = np.pi * (rng.random(size) - 0.5)
    weight = rng.exponential(1.0, size)
    return (
        np.sin(gamma * angle) / np.cos(angle) ** (1.0 / gamma)
        * (np.cos(angle - gamma * angle) / weight) ** ((1.0 - gamma) / gamma)
    )


def _stable_sum(spec: ProcessSpec, rng: np.random.Generator) -> np.ndarray:
    """Sums of n symmetric stable draws rescaled by n^{-1/γ} (plain means for Cauchy)."""
    out = np.empty(spec.sample_count)
    scale = spec.n ** (-1.0 / spec.tail_gamma)
    for start, stop in _chunks(spec.sample_count, spec.n):
        draws = _stable_draws(spec.tail_gamma, (stop - start, spec.n), rng)
        out[start:stop] = draws.sum(axis=1) * scale
    return out


def _superstat_mixture(spec: ProcessSpec, rng: np.random.Generator) -> np.ndarray:
    """Exponential draws whose rate is itself drawn from a catalog density."""
    params = dict(spec.parameter_params)
    if spec.parameter_entry == "gamma":
        shape, rate = params.get("k", 2.0), params.get("alpha", 1.0)
        rates = rng.gamma(shape, 1.0 / rate, size=spec.sample_count)
    else:
        rates = sample_from_grid(normalize(instantiate(spec.parameter_entry, params)), spec.sample_count, rng)
    return rng.exponential(1.0, size=spec.sample_count) / rates


SAMPLERS: Dict[str, Callable[[ProcessSpec, np.random.Generator], np.ndarray]] = {
    "waiting_time": _waiting_time,
    "product": _product,
    "sample_maximum": _sample_maximum,
    "stable_sum": _stable_sum,
    "superstat_mixture": _superstat_mixture,
}


def sample_from_grid(dist: GridDistribution, size: int, rng: np.random.Generator) -> np.ndarray:
    """Inverse-CDF draws from a tabulated density."""
    cdf = dist.cdf()
    return np.interp(rng.random(size) * cdf[-1], cdf, dist.grid)


def simulate(spec: ProcessSpec) -> np.ndarray:
    """Draw ``spec.sample_count`` samples; identical specs give identical streams."""
    samples = SAMPLERS[spec.kind](spec, make_rng(spec.seed))
    logger.debug("Simulated process", extra={"kind": spec.kind, "samples": spec.sample_count, "seed": spec.seed})
    return samples


# Goodness of fit


def ks_statistic(samples: np.ndarray, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """Exact one-sample statistic max_i max(i/n - F(x_(i)), F(x_(i)) - (i-1)/n)."""
    ordered = np.sort(np.asarray(samples, dtype=float))
    n = ordered.size
    values = cdf(ordered)
    ranks = np.arange(1, n + 1) / n
    return float(max(np.max(ranks - values), np.max(values - (ranks - 1.0 / n))))


def grid_cdf(dist: GridDistribution) -> Callable[[np.ndarray], np.ndarray]:
    cumulative = dist.cdf()
    cumulative = cumulative / cumulative[-1]
    return lambda points: np.interp(points, dist.grid, cumulative, left=0.0, right=1.0)


def fit_against_prediction(
    samples: np.ndarray,
    predicted: GridDistribution,
    label: str = "grid",
    ks_constant: float = KS_CONSTANT,
    scenario: Optional[str] = None,
    seed: Optional[int] = None,
) -> FitReport:
    """KS verdict of *samples* against the CDF of *predicted*; pass when D < c/√n."""
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 1 or samples.size < MIN_SAMPLES or not np.all(np.isfinite(samples)):
        raise InvalidSpec(
            f"need at least {MIN_SAMPLES} finite samples", {"sample_count": int(samples.size)}
        )
    statistic = ks_statistic(samples, grid_cdf(predicted))
    threshold = ks_constant / math.sqrt(samples.size)
    report = FitReport(
        ks_statistic=min(max(statistic, 0.0), 1.0),
        sample_count=int(samples.size),
        threshold=threshold,
        predicted=label,
        passed=statistic < threshold,
        scenario=scenario,
        seed=seed,
    )
    logger.info(
        "Fitted samples",
        extra={"scenario": scenario, "predicted": label, "ks": statistic, "threshold": threshold, "pass": report.passed},
    )
    return report


# Scenarios

Target = Tuple[str, Dict[str, float], Optional[str]]


@dataclasses.dataclass(frozen=True)
class Scenario:
    """A generative story, its predicted law, and a law it must not match."""

    name: str
    process: Dict[str, object]
    predicted: Target
    mismatch: Target
    standardize: Callable[[np.ndarray, ProcessSpec], np.ndarray] = lambda samples, spec: samples
    mixture: bool = False

    def build(self, sample_count: int, seed: int) -> ProcessSpec:
        return ProcessSpec(**self.process, sample_count=sample_count, seed=seed)


def _gumbel_location(samples: np.ndarray, spec: ProcessSpec) -> np.ndarray:
    return samples - math.log(spec.n)


def _frechet_scale(samples: np.ndarray, spec: ProcessSpec) -> np.ndarray:
    return samples / spec.n ** (1.0 / spec.parent_params.get("alpha", 2.0))


EULER_GAMMA: float = 0.5772156649015329

SCENARIOS: Dict[str, Scenario] = {
    scenario.name: scenario
    for scenario in (
        Scenario(
            "waiting_time_gamma",
            {"kind": "waiting_time", "k": 3, "rate": 1.0},
            ("gamma", {"k": 3.0, "alpha": 1.0}, None),
            ("exponential", {"lam": 1.0 / 3.0}, None),
        ),
        Scenario(
            "product_lognormal",
            {"kind": "product", "n": 50, "factor_law": "log_uniform", "log_variance": 1.0 / 50.0},
            ("lognormal", {"lam": 0.5}, None),
            ("exponential", {"lam": math.exp(-0.5)}, None),
        ),
        Scenario(
            "maxima_gumbel",
            {"kind": "sample_maximum", "n": 1000, "parent": "exponential", "parent_params": {"lam": 1.0}},
            ("gumbel", {"lam": 1.0, "beta": 1.0}, "max"),
            ("gauss", {"lam": 0.5, "mu": EULER_GAMMA}, None),
            standardize=_gumbel_location,
        ),
        Scenario(
            "maxima_frechet",
            {"kind": "sample_maximum", "n": 1000, "parent": "pareto", "parent_params": {"alpha": 2.0}},
            ("frechet_weibull", {"lam": 1.0, "beta": 2.0}, "frechet"),
            ("exponential", {"lam": 1.0}, None),
            standardize=_frechet_scale,
        ),
        Scenario(
            "stable_sum_cauchy",
            {"kind": "stable_sum", "n": 1000, "tail_gamma": 1.0},
            ("generalized_students", {"k": 1.0, "alpha": 1.0}, None),
            ("gauss", {"lam": 0.5}, None),
        ),
        Scenario(
            "superstat_lomax",
            {"kind": "superstat_mixture", "parameter_entry": "gamma", "parameter_params": {"k": 2.0, "alpha": 1.0}},
            ("gamma", {"k": 2.0, "alpha": 1.0}, None),
            ("exponential", {"lam": 1.0}, None),
            mixture=True,
        ),
    )
}


def get_scenario(name: str) -> Scenario:
    scenario = SCENARIOS.get(name)
    if scenario is None:
        raise UnknownScenario(f"no scenario named {name!r}", {"name": name, "known": sorted(SCENARIOS)})
    return scenario


def _label(target: Target) -> str:
    name, params, orientation = target
    rendered = ",".join(f"{key}={value:g}" for key, value in sorted(params.items()))
    return f"{name}({rendered})" + (f"[{orientation}]" if orientation else "")


def predicted_distribution(scenario: Scenario) -> Tuple[GridDistribution, str]:
    """The density a scenario's samples should follow, with its label."""
    name, params, orientation = scenario.predicted
    dist = normalize(instantiate(name, params, orientation))
    if scenario.mixture:
        return superstatistics_mix(TransformKernel(kind="laplace"), dist), f"superstatistics_mix({_label(scenario.predicted)})"
    return dist, _label(scenario.predicted)


def scenario_samples(name: str, sample_count: int = 100_000, seed: Optional[int] = None) -> np.ndarray:
    """Standardized samples of a scenario."""
    scenario = get_scenario(name)
    spec = scenario.build(sample_count, config.default_seed() if seed is None else seed)
    return scenario.standardize(simulate(spec), spec)


def run_scenario(
    name: str, sample_count: int = 100_000, seed: Optional[int] = None, ks_constant: float = KS_CONSTANT
) -> FitReport:
    """Simulate a shipped scenario and fit it against its predicted law.

    Raises:
        UnknownScenario: *name* is not shipped.
    """
    scenario = get_scenario(name)
    seed = config.default_seed() if seed is None else seed
    samples = scenario_samples(name, sample_count, seed)
    predicted, label = predicted_distribution(scenario)
    return fit_against_prediction(samples, predicted, label, ks_constant, scenario=name, seed=seed)


def run_mismatch(
    name: str, sample_count: int = 100_000, seed: Optional[int] = None, ks_constant: float = KS_CONSTANT
) -> FitReport:
    """Fit a scenario's samples against its documented wrong law; the verdict should fail."""
    scenario = get_scenario(name)
    seed = config.default_seed() if seed is None else seed
    samples = scenario_samples(name, sample_count, seed)
    wrong_name, wrong_params, wrong_orientation = scenario.mismatch
    predicted = normalize(instantiate(wrong_name, wrong_params, wrong_orientation))
    return fit_against_prediction(samples, predicted, _label(scenario.mismatch), ks_constant, scenario=name, seed=seed)


def maxima_convergence(
    parent_sizes: Sequence[int] = (100, 1000, 10_000),
    seeds: Sequence[int] = (0, 1, 2, 3, 4),
    sample_count: int = 100_000,
) -> Dict[int, float]:
    """Median KS statistic of standardized exponential maxima against Gumbel, per parent size.

    Seeds are shared across sizes so every size sees the same uniforms.
    """
    gumbel_cdf = grid_cdf(normalize(instantiate("gumbel", {"lam": 1.0, "beta": 1.0}, "max")))
    scenario = get_scenario("maxima_gumbel")
    medians: Dict[int, float] = {}
    for n in parent_sizes:
        statistics = []
        for seed in seeds:
            spec = ProcessSpec(**{**scenario.process, "n": n}, sample_count=sample_count, seed=seed)
            statistics.append(ks_statistic(_gumbel_location(simulate(spec), spec), gumbel_cdf))
        medians[int(n)] = float(np.median(statistics))
    logger.info("Maxima convergence", extra={"medians": medians})
    return medians
