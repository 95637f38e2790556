"""Command-line interface: coverage values, ccdf curves, density sweeps, property suites.

Exit status is 0 on success, 1 when a validation property fails and 2 on
usage or domain errors.  Tabular output is CSV with a header row and
``#``-prefixed metadata lines at the end; it is byte-stable for fixed inputs.
"""

from __future__ import annotations

import argparse
import contextlib
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import analytic as an
from .analytic import DomainError, Metric, NetworkScenario
from .montecarlo import Fading, SimConfig, estimate_ccdf, simulate
from .pathloss import PathLossModel
from .quadrature import ConvergenceError
from .scaling import FitError, sweep_density
from .validation import run_suite, suite_names

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = ["ScenarioFile", "load_scenario", "bundled_scenarios", "build_parser", "main"]

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

_TOP_KEYS = {"density", "noise", "pathloss", "thresholds", "threshold_db", "sim", "sweep"}
_THRESHOLD_KEYS = {"min_db", "max_db", "steps"}
_SIM_KEYS = {"trials", "seed", "window_radius", "fading", "shadow_sigma_db", "confidence",
             "fluctuation_tol", "compensate"}
_SWEEP_KEYS = {"lambda_min", "lambda_max", "steps", "fit_min", "fit_max"}


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class ScenarioFile:
    scenario: NetworkScenario
    thresholds_db: tuple[float, ...] | None = None
    threshold_db: float | None = None
    sim: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)


def _reject_unknown(section: str, data: dict, allowed: set) -> None:
    unknown = set(data) - allowed
    if unknown:
        raise UsageError(f"unknown key(s) in {section}: {', '.join(sorted(unknown))}")


def _threshold_grid(spec) -> tuple[float, ...]:
    if isinstance(spec, dict):
        _reject_unknown("thresholds", spec, _THRESHOLD_KEYS)
        steps = int(spec["steps"])
        return tuple(np.linspace(float(spec["min_db"]), float(spec["max_db"]), steps).tolist())
    return tuple(float(v) for v in spec)


def parse_scenario(data: dict) -> ScenarioFile:
    """Build a :class:`ScenarioFile` from decoded TOML/JSON, rejecting unknown keys."""
    _reject_unknown("scenario", data, _TOP_KEYS)
    for key in ("density", "noise", "pathloss"):
        if key not in data:
            raise UsageError(f"scenario is missing required key {key!r}")
    try:
        model = PathLossModel.from_dict(data["pathloss"])
    except KeyError as exc:
        raise UsageError(f"pathloss is missing key {exc}") from None
    scenario = NetworkScenario(float(data["density"]), float(data["noise"]), model)
    sim = dict(data.get("sim", {}))
    _reject_unknown("sim", sim, _SIM_KEYS)
    sweep = dict(data.get("sweep", {}))
    _reject_unknown("sweep", sweep, _SWEEP_KEYS)
    grid = _threshold_grid(data["thresholds"]) if "thresholds" in data else None
    t_db = float(data["threshold_db"]) if "threshold_db" in data else None
    return ScenarioFile(scenario, grid, t_db, sim, sweep)


def bundled_scenarios() -> list[str]:
    root = resources.files("multislope") / "scenarios"
    return sorted(p.name.rsplit(".", 1)[0] for p in root.iterdir() if p.name.endswith(".toml"))


def _scenario_text(path: str) -> tuple[str, str]:
    p = Path(path)
    if p.is_file():
        return p.read_text(), p.suffix.lower()
    if not p.suffix and path in bundled_scenarios():
        return (resources.files("multislope") / "scenarios" / f"{path}.toml").read_text(), ".toml"
    raise UsageError(f"scenario file not found: {path}")


def load_scenario(path: str) -> ScenarioFile:
    """Read a ``.toml`` or ``.json`` scenario, or a bundled scenario by name (e.g. ``fig4_lambda1``)."""
    text, suffix = _scenario_text(path)
    try:
        data = json.loads(text) if suffix == ".json" else tomllib.loads(text)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise UsageError(f"cannot parse {path}: {exc}") from None
    return parse_scenario(data)


# --- helpers -----------------------------------------------------------------------


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _sim_config(sf: ScenarioFile, args) -> SimConfig:
    opts = dict(sf.sim)
    opts.setdefault("trials", 100_000)
    if args.trials is not None:
        opts["trials"] = args.trials
    if args.seed is not None:
        opts["seed"] = args.seed
    if "fading" in opts:
        opts["fading"] = Fading(opts["fading"])
    return SimConfig(**opts)


def _threshold_linear(args, sf: ScenarioFile) -> float:
    if args.T_linear is not None:
        return args.T_linear
    if args.T_db is not None:
        return an.db_to_linear(args.T_db)
    if sf.threshold_db is not None:
        return an.db_to_linear(sf.threshold_db)
    raise UsageError("a threshold is required (--T-db or --T-linear, or threshold_db in the scenario)")


_METHODS = {
    "general": an.coverage_general,
    "dual": an.coverage_dual,
    "two-ray": an.coverage_tworay,
    "multislope": an.coverage_multislope,
    "snr-integral": an.coverage_snr,
    "snr-closed": an.coverage_snr_tworay,
    "lower-bound": an.coverage_sinr_lower_bound_tworay,
}
_METHODS_BY_METRIC = {
    Metric.SIR: {"auto", "general", "dual", "two-ray", "multislope"},
    Metric.SINR: {"auto", "general", "dual", "two-ray", "multislope", "lower-bound"},
    Metric.SNR: {"auto", "snr-integral", "snr-closed"},
}


def _analytic_method(metric: Metric, method: str):
    if method not in _METHODS_BY_METRIC[metric]:
        raise UsageError(f"method {method!r} does not apply to metric {metric.value}")
    if method == "auto":
        return an.coverage_snr if metric is Metric.SNR else an.coverage
    return _METHODS[method]


def _metric_scenario(scenario: NetworkScenario, metric: Metric) -> NetworkScenario:
    return scenario.with_noise(0.0) if metric is Metric.SIR else scenario


def _parallel_map(fn, items, threads: int):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


# --- subcommands -------------------------------------------------------------------


def cmd_coverage(args, out) -> int:
    sf = load_scenario(args.scenario)
    metric = Metric(args.metric.upper())
    t = _threshold_linear(args, sf)
    scenario = _metric_scenario(sf.scenario, metric)
    if args.method == "monte-carlo":
        cfg = _sim_config(sf, args)
        est = estimate_ccdf(scenario, cfg, [t], metric, threads=args.threads)
        value, err, method = float(est.estimates[0]), float(est.ci_halfwidths[0]), "monte-carlo"
    else:
        res = _analytic_method(metric, args.method)(scenario, t)
        value, err, method = res.value, res.error_estimate, res.method.value
    out.write(f"metric={metric.value} method={method} threshold_db={_fmt(an.linear_to_db(t))} "
              f"value={_fmt(value)} error_estimate={_fmt(err)}\n")
    return EXIT_OK


def _ccdf_grid(args, sf: ScenarioFile) -> tuple[float, ...]:
    if args.min_db is not None or args.max_db is not None or args.steps is not None:
        if None in (args.min_db, args.max_db, args.steps):
            raise UsageError("--min-db, --max-db and --steps must be given together")
        grid = tuple(np.linspace(args.min_db, args.max_db, args.steps).tolist())
    elif sf.thresholds_db is not None:
        grid = sf.thresholds_db
    else:
        raise UsageError("no threshold grid: give --min-db/--max-db/--steps or thresholds in the scenario")
    if not grid:
        raise UsageError("the threshold grid is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise UsageError("thresholds must be strictly increasing")
    return grid


def cmd_ccdf(args, out) -> int:
    sf = load_scenario(args.scenario)
    metric = Metric(args.metric.upper())
    grid_db = _ccdf_grid(args, sf)
    ts = an.db_to_linear(np.array(grid_db))
    scenario = _metric_scenario(sf.scenario, metric)
    method = _analytic_method(metric, args.method)
    analytic = _parallel_map(lambda t: method(scenario, t), ts, args.threads)

    model = scenario.pathloss
    with_bound = (metric is Metric.SINR and scenario.noise > 0 and model.exponents == (2.0, 4.0))
    columns = {"threshold_db": list(grid_db), "analytic": [r.value for r in analytic]}
    if with_bound:
        columns["lower_bound"] = [an.coverage_sinr_lower_bound_tworay(scenario, t).value for t in ts]
    meta = [f"metric={metric.value}", f"analytic_method={analytic[0].method.value}"]
    if args.with_mc:
        cfg = _sim_config(sf, args)
        samples = simulate(scenario, cfg, threads=args.threads)
        est = estimate_ccdf(scenario, cfg, ts, metric, samples=samples)
        columns["mc_estimate"] = est.estimates.tolist()
        columns["mc_ci"] = est.ci_halfwidths.tolist()
        meta += [f"trials={cfg.trials}", f"seed={cfg.seed}", f"window_radius={_fmt(samples.window_radius)}",
                 f"fading={cfg.fading.value}", f"confidence={_fmt(cfg.confidence)}"]

    out.write(",".join(columns) + "\n")
    for row in zip(*columns.values()):
        out.write(",".join(_fmt(v) for v in row) + "\n")
    for line in meta:
        out.write(f"# {line}\n")
    return EXIT_OK


def _sweep_grid(args, sf: ScenarioFile) -> np.ndarray:
    lo = args.lambda_min if args.lambda_min is not None else sf.sweep.get("lambda_min")
    hi = args.lambda_max if args.lambda_max is not None else sf.sweep.get("lambda_max")
    steps = args.lambda_steps if args.lambda_steps is not None else sf.sweep.get("steps")
    if None in (lo, hi, steps):
        raise UsageError("no density grid: give --lambda-min/--lambda-max/--lambda-steps or [sweep] in the scenario")
    return np.logspace(math.log10(lo), math.log10(hi), int(steps))


def cmd_sweep(args, out) -> int:
    sf = load_scenario(args.scenario)
    t = _threshold_linear(args, sf)
    grid = _sweep_grid(args, sf)
    fit_lo = args.fit_min if args.fit_min is not None else sf.sweep.get("fit_min")
    fit_hi = args.fit_max if args.fit_max is not None else sf.sweep.get("fit_max")
    fit_range = None if fit_lo is None and fit_hi is None else (fit_lo or grid[0], fit_hi or grid[-1])
    sw = sweep_density(sf.scenario.pathloss, t, sf.scenario.noise, grid,
                       fit_range=fit_range, threads=args.threads)
    out.write("lambda,coverage_sir,coverage_snr,coverage_sinr,mu,tau\n")
    for row in zip(sw.densities, sw.coverage_sir, sw.coverage_snr, sw.coverage, sw.mu, sw.tau):
        out.write(",".join(_fmt(v) for v in row) + "\n")
    lo, hi = sw.fit_range
    out.write(f"# threshold_db={_fmt(an.linear_to_db(t))}\n")
    out.write(f"# fitted_exponent={_fmt(sw.fitted_exponent)} fit_residual={_fmt(sw.fit_residual)} "
              f"fit_window=[{_fmt(lo)},{_fmt(hi)}]\n")
    return EXIT_OK


def cmd_validate(args, out) -> int:
    checks = run_suite(args.suite, seed=args.seed or 0, trials=args.trials or 20_000,
                       threads=args.threads)
    out.write("property,grid_size,worst_margin,status\n")
    for c in checks:
        out.write(f"{c.name},{c.grid_size},{c.worst_margin:.6e},{'pass' if c.passed else 'fail'}\n")
    failed = sum(not c.passed for c in checks)
    out.write(f"# suite={args.suite} seed={args.seed or 0} trials={args.trials or 20_000} "
              f"failed={failed}/{len(checks)}\n")
    return EXIT_FAIL if failed else EXIT_OK


# --- parser ------------------------------------------------------------------------


def _common(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = {"default": argparse.SUPPRESS} if suppress else {}
    parser.add_argument("--scenario", help="scenario file (.toml/.json) or bundled scenario name", **d)
    parser.add_argument("--seed", type=int, help="Monte Carlo seed (u64)", **d)
    parser.add_argument("--trials", type=int, help="Monte Carlo trials", **d)
    parser.add_argument("--out", help="output path (default: standard output)", **d)
    parser.add_argument("--threads", type=int, help="worker threads (does not change results)", **d)


def _threshold_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--T-db", dest="T_db", type=float, help="threshold in dB")
    group.add_argument("--T-linear", dest="T_linear", type=float, help="linear threshold")


def _metric_flags(parser: argparse.ArgumentParser, monte_carlo: bool) -> None:
    parser.add_argument("--metric", choices=["sir", "snr", "sinr"], default="sinr")
    methods = ["auto", *_METHODS] + (["monte-carlo"] if monte_carlo else [])
    parser.add_argument("--method", default="auto", choices=methods)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="multislope", description=__doc__.splitlines()[0])
    _common(parser, suppress=False)
    parser.set_defaults(scenario=None, seed=None, trials=None, out=None, threads=1)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coverage", help="one coverage value")
    _common(p, suppress=True)
    _metric_flags(p, monte_carlo=True)
    _threshold_flags(p)
    p.set_defaults(func=cmd_coverage)

    p = sub.add_parser("ccdf", help="coverage over a threshold grid (CSV)")
    _common(p, suppress=True)
    _metric_flags(p, monte_carlo=False)
    p.add_argument("--min-db", type=float)
    p.add_argument("--max-db", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--with-mc", action="store_true", help="add Monte Carlo estimate and CI columns")
    p.set_defaults(func=cmd_ccdf)

    p = sub.add_parser("sweep", help="coverage, coverage density and throughput versus density (CSV)")
    _common(p, suppress=True)
    _threshold_flags(p)
    p.add_argument("--lambda-min", type=float)
    p.add_argument("--lambda-max", type=float)
    p.add_argument("--lambda-steps", type=int)
    p.add_argument("--fit-min", type=float)
    p.add_argument("--fit-max", type=float)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", help="run a property suite")
    _common(p, suppress=True)
    p.add_argument("suite", choices=suite_names())
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    if args.command != "validate" and args.scenario is None:
        print("error: --scenario is required", file=sys.stderr)
        return EXIT_USAGE
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_USAGE

    buffer = io.StringIO()
    try:
        status = args.func(args, buffer)
    except DomainError as exc:
        extra = "" if exc.analytic_value is None else f" (analytic value: {_fmt(exc.analytic_value)})"
        print(f"error: {exc}{extra}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, ValueError, KeyError, FitError, ConvergenceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    text = buffer.getvalue()
    if args.out:
        Path(args.out).write_text(text)
    else:
        with contextlib.suppress(BrokenPipeError):
            sys.stdout.write(text)
            sys.stdout.flush()
    return status


if __name__ == "__main__":
    sys.exit(main())
