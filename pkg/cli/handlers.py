"""Subcommand handlers for the scalekit command line.

Each public ``handle_*`` function runs one subcommand and returns its exit
code.  Its flags are declared next to it and attached by
:mod:`cli.dispatcher` through the registry.
"""

import argparse
import json
import sys
from typing import Any, Dict, Mapping, Optional

import numpy as np

from core.logger import ScalekitLogger
from core.storage import render_csv, render_json, write_atomic, write_csv
from cli.registry import RunConfig, registry
from scalekit.catalog import bind_parameters, catalog, instantiate, verify_entry
from scalekit.exceptions import InvalidSpec
from scalekit.maxent_engine import DEFAULT_GRID_POINTS, entropy, normalize, solve_lambda
from scalekit.models import (
    Constraint,
    DistributionSpec,
    GridDistribution,
    Interval,
    MeasureAdjustment,
    MeasurementScale,
    TransformKernel,
    VariableChange,
)
from scalekit.scale_algebra import (
    check_affine_invariance,
    default_sample_points,
    parse_measurement_scale,
    parse_observable,
    parse_scale,
    parse_transform,
)
from scalekit.simulation import KS_CONSTANT, SCENARIOS, run_mismatch, run_scenario, scenario_samples
from scalekit.transforms import FFT_POINTS, FFT_SPAN, apply_kernel, change_of_variable, levy_stable_density

logger = ScalekitLogger.get_logger()

# Catalog parameter flags, as (flag spellings, parameter name).
PARAMETER_FLAGS: tuple[tuple[tuple[str, ...], str], ...] = (
    (("--lambda", "--lam"), "lam"),
    (("--beta",), "beta"),
    (("--k",), "k"),
    (("--alpha",), "alpha"),
    (("--gamma",), "gamma"),
    (("--b",), "b"),
    (("--c1",), "c1"),
    (("--c2",), "c2"),
    (("--mu",), "mu"),
    (("--nu",), "nu"),
    (("--y-max",), "y_max"),
)
PARAMETER_NAMES: tuple[str, ...] = tuple(name for _, name in PARAMETER_FLAGS)


# Argument types


def json_value(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        # Bare words such as ``linear`` or ``identity``.
        if text.isidentifier():
            return text
        raise argparse.ArgumentTypeError(f"not valid JSON: {text!r}")


def interval(text: str) -> tuple[float, float]:
    """``lo,hi`` with ``inf`` allowed at either end."""
    try:
        lo, hi = (float(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo,hi but got {text!r}")
    if not lo < hi:
        raise argparse.ArgumentTypeError(f"empty interval {text!r}")
    return lo, hi


def float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers but got {text!r}")


# Shared argument groups


def output_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", help="write to this path instead of stdout")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")


def distribution_arguments(parser: argparse.ArgumentParser, allow_input: bool = False) -> None:
    """Flags selecting a distribution: a catalog entry, a raw spec, or a grid file."""
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--dist", choices=catalog.names(), metavar="NAME", help="catalog entry")
    source.add_argument("--scale", type=json_value, help="raw scale expression (JSON)")
    if allow_input:
        source.add_argument("--in", dest="input_path", help="GridDistribution CSV or JSON file")
    parser.add_argument("--orientation", help="catalog orientation, e.g. max or frechet")
    for flags, name in PARAMETER_FLAGS:
        parser.add_argument(*flags, dest=name, type=float, default=None)
    parser.add_argument("--observable", type=json_value, default="identity")
    parser.add_argument("--measure", choices=("unit", "derivative"), default="unit")
    parser.add_argument("--support", type=interval, default=None, help="lo,hi (use --support=-inf,0 for a leading minus)")
    parser.add_argument("--mean", type=float, default=None, help="solve lambda for this mean of T")
    parser.add_argument("--points", type=int, default=DEFAULT_GRID_POINTS)


# Distribution helpers


def catalog_parameters(params: Mapping[str, Any]) -> Dict[str, float]:
    return {name: params[name] for name in PARAMETER_NAMES if params.get(name) is not None}


def validate(config: RunConfig) -> None:
    """Check catalog parameters against their domain before any numerics run."""
    values = catalog_parameters(config.params)
    name = config.params.get("dist")
    if config.command == "verify" and values:
        name = config.params.get("name")
    if name is not None:
        bind_parameters(catalog.get(name), values)


def build_spec(params: Mapping[str, Any]) -> DistributionSpec:
    """Spec from ``--dist`` plus parameter flags, or from the raw spec flags."""
    if params.get("dist"):
        if params.get("mean") is not None:
            raise InvalidSpec("--mean applies to raw specs only", {"dist": params["dist"]})
        return instantiate(params["dist"], catalog_parameters(params), params.get("orientation"))

    stray = sorted(set(catalog_parameters(params)) - {"lam", "beta"})
    if stray:
        raise InvalidSpec("catalog parameter flags need --dist", {"flags": stray})
    scale = parse_measurement_scale(params["scale"])
    if params.get("beta"):
        scale = MeasurementScale.wrap(scale.base, params["beta"])
    support = Interval(lo=params["support"][0], hi=params["support"][1]) if params.get("support") else Interval()
    template = DistributionSpec(
        scale=scale,
        observable=parse_observable(params.get("observable", "identity")),
        lam=params.get("lam"),
        measure=MeasureAdjustment.scale_derivative() if params.get("measure") == "derivative" else MeasureAdjustment.unit(),
        support=support,
    )
    if params.get("mean") is not None:
        template = template.with_lambda(solve_lambda(template, Constraint(target_mean=params["mean"])))
    return template


def load_grid(path: str) -> GridDistribution:
    """Read a GridDistribution from the CSV (y,density) or JSON export format."""
    try:
        if path.endswith(".json"):
            with open(path, encoding="utf-8") as handle:
                data = json.load(handle)
            return GridDistribution(
                grid=data["grid"],
                density=data["density"],
                normalization_constant=data.get("psi", 1.0),
                quadrature_error=data.get("quadrature_error", 0.0),
            )
        table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except (OSError, ValueError, KeyError) as exc:
        raise InvalidSpec(f"cannot read grid file {path!r}", {"path": path, "error": str(exc)})
    return GridDistribution(grid=table[:, 0], density=table[:, 1], normalization_constant=1.0, quadrature_error=0.0)


def build_distribution(params: Mapping[str, Any]) -> GridDistribution:
    if params.get("input_path"):
        return load_grid(params["input_path"])
    return normalize(build_spec(params), params.get("points", DEFAULT_GRID_POINTS))


# Output helpers


def emit(config: RunConfig, text: str) -> None:
    if config.output_path:
        path = write_atomic(config.output_path, text)
        logger.info("Wrote output", extra={"command": config.command, "path": path})
    else:
        sys.stdout.write(text)


def emit_grid(config: RunConfig, dist: GridDistribution) -> None:
    if config.format == "json":
        emit(config, render_json(dist.to_json_dict()))
    else:
        emit(config, render_csv(("y", "density"), dist.rows()))


def emit_table(config: RunConfig, columns: Dict[str, np.ndarray]) -> None:
    if config.format == "json":
        emit(config, render_json({key: np.asarray(values).tolist() for key, values in columns.items()}))
    else:
        emit(config, render_csv(tuple(columns), zip(*(np.asarray(values).tolist() for values in columns.values()))))


def print_report(payload: Any) -> None:
    sys.stdout.write(render_json(payload))


# catalog


def _catalog_arguments(parser: argparse.ArgumentParser) -> None:
    actions = parser.add_subparsers(dest="action", required=True, metavar="{list,show}")
    output_arguments(actions.add_parser("list", help="describe every entry"))
    show = actions.add_parser("show", help="describe one entry")
    show.add_argument("name", choices=catalog.names(), metavar="NAME")
    output_arguments(show)


@registry.register("catalog", description="List or show catalog entries", arguments=_catalog_arguments)
def handle_catalog(config: RunConfig) -> int:
    """Describe entries: recipe, closed forms, parameter domains and notes."""
    if config.params["action"] == "show":
        payload: Any = catalog.get(config.params["name"]).describe()
    else:
        payload = [entry.describe() for _, entry in sorted(catalog.entries().items())]
    emit(config, render_json(payload))
    return 0


# eval


def _eval_arguments(parser: argparse.ArgumentParser) -> None:
    distribution_arguments(parser)
    output_arguments(parser)


@registry.register("eval", description="Normalize a distribution onto a grid", arguments=_eval_arguments)
def handle_eval(config: RunConfig) -> int:
    dist = build_distribution(config.params)
    logger.info("Evaluated distribution", extra={"points": int(dist.grid.size), "psi": dist.normalization_constant})
    emit_grid(config, dist)
    return 0


# entropy


@registry.register("entropy", description="Differential entropy of a distribution", arguments=_eval_arguments)
def handle_entropy(config: RunConfig) -> int:
    dist = build_distribution(config.params)
    payload = {
        "entropy": entropy(dist),
        "psi": dist.normalization_constant,
        "quadrature_error": dist.quadrature_error,
        "points": int(dist.grid.size),
    }
    emit(config, render_json(payload))
    return 0


# transform


def _transform_arguments(parser: argparse.ArgumentParser) -> None:
    actions = parser.add_subparsers(dest="action", required=True, metavar="{laplace,fourier,levy,changevar}")

    for name, dual in (("laplace", "s"), ("fourier", "x")):
        sub = actions.add_parser(name, help=f"{name} transform at the given {dual} values")
        distribution_arguments(sub, allow_input=True)
        sub.add_argument("--at", dest="dual_points", type=float_list, required=True, help=f"comma-separated {dual} values")
        output_arguments(sub)

    levy = actions.add_parser("levy", help="symmetric stable density by Fourier inversion")
    levy.add_argument("--gamma", type=float, required=True)
    levy.add_argument("--phi", type=float, default=1.0)
    levy.add_argument("--n-points", type=int, default=FFT_POINTS)
    levy.add_argument("--span", type=float, default=FFT_SPAN)
    output_arguments(levy)

    changevar = actions.add_parser("changevar", help="carry a density through x = g(y)")
    distribution_arguments(changevar, allow_input=True)
    changevar.add_argument("--g", type=json_value, required=True, help="map g as a scale expression (JSON)")
    changevar.add_argument("--map-support", type=interval, default=None, help="support of y")
    output_arguments(changevar)


@registry.register("transform", description="Laplace, Fourier, Levy and change-of-variable transforms",
                   arguments=_transform_arguments)
def handle_transform(config: RunConfig) -> int:
    params = config.params
    action = params["action"]
    if action == "levy":
        emit_grid(config, levy_stable_density(params["gamma"], params["phi"], params["n_points"], params["span"]))
        return 0

    source = build_distribution(params)
    if action == "changevar":
        lo, hi = params["map_support"] or (-np.inf, np.inf)
        change = VariableChange(g=parse_scale(params["g"]), support=Interval(lo=lo, hi=hi))
        emit_grid(config, change_of_variable(source, change))
        return 0

    points = np.asarray(params["dual_points"], dtype=float)
    values = apply_kernel(TransformKernel(kind=action), source, points)
    if action == "laplace":
        emit_table(config, {"s": points, "value": np.real(values)})
    else:
        emit_table(config, {"x": points, "re": np.real(values), "im": np.imag(values)})
    return 0


# simulate


def _simulate_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("scenario", choices=sorted(SCENARIOS), metavar="SCENARIO")
    parser.add_argument("--n", dest="sample_count", type=int, default=100_000, help="number of samples")
    parser.add_argument("--seed", type=int, default=None, help="defaults to SCALEKIT_SEED, then 42")
    parser.add_argument("--ks-constant", type=float, default=KS_CONSTANT)
    parser.add_argument("--mismatch", action="store_true", help="fit against the scenario's wrong law instead")
    parser.add_argument("--out", help="write the standardized samples as CSV")


@registry.register("simulate", description="Run a Monte Carlo scenario and its KS verdict",
                   arguments=_simulate_arguments)
def handle_simulate(config: RunConfig) -> int:
    """Print the FitReport; the samples go to ``--out`` when given."""
    params = config.params
    run = run_mismatch if params["mismatch"] else run_scenario
    report = run(params["scenario"], params["sample_count"], params["seed"], params["ks_constant"])
    if config.output_path:
        samples = scenario_samples(params["scenario"], params["sample_count"], report.seed)
        path = write_csv(config.output_path, ("sample",), ((value,) for value in samples.tolist()))
        logger.info("Wrote samples", extra={"scenario": params["scenario"], "path": path})
    print_report(report.model_dump(by_alias=True))
    return 0


# invariance


def _invariance_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--scale", type=json_value, required=True)
    parser.add_argument("--beta", type=float, default=None)
    parser.add_argument("--observable", type=json_value, default="identity")
    parser.add_argument("--transform", type=json_value, required=True)
    parser.add_argument("--lo", type=float, default=1e-2)
    parser.add_argument("--hi", type=float, default=1e2)
    parser.add_argument("--count", type=int, default=64)
    parser.add_argument("--tolerance", type=float, default=1e-9)


@registry.register("invariance", description="Test T(G(f)) = a + b T(f) for a scale and transform",
                   arguments=_invariance_arguments)
def handle_invariance(config: RunConfig) -> int:
    """Print the InvarianceReport; a non-invariant pair is a result, not an error."""
    params = config.params
    scale = parse_measurement_scale(params["scale"])
    if params["beta"]:
        scale = MeasurementScale.wrap(scale.base, params["beta"])
    report = check_affine_invariance(
        scale,
        parse_observable(params["observable"]),
        parse_transform(params["transform"]),
        default_sample_points(params["lo"], params["hi"], params["count"]),
        params["tolerance"],
    )
    print_report(report.model_dump())
    return 0


# verify


def _verify_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("name", choices=catalog.names(), metavar="NAME")
    parser.add_argument("--orientation")
    for flags, name in PARAMETER_FLAGS:
        parser.add_argument(*flags, dest=name, type=float, default=None)


@registry.register("verify", description="Check a catalog recipe against its closed form",
                   arguments=_verify_arguments)
def handle_verify(config: RunConfig) -> int:
    """Verify at the given parameters, or at every shipped setting and orientation.

    Exits 0 when every report passes and 1 otherwise.
    """
    params = config.params
    entry = catalog.get(params["name"])
    orientation: Optional[str] = params.get("orientation")
    orientations = (orientation,) if orientation or not entry.orientations else entry.orientations
    given = catalog_parameters(params)
    settings = (given,) if given else entry.verify_params
    reports = [verify_entry(entry.name, setting, side) for setting in settings for side in orientations]
    passed = all(report.passed for report in reports)
    print_report({
        "name": entry.name,
        "pass": passed,
        "reports": [report.model_dump(by_alias=True) for report in reports],
    })
    return 0 if passed else 1
