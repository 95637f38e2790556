"""Monte Carlo estimation of coverage by direct simulation of the Poisson network.

Each trial drops a Poisson number of BSs uniformly in a disk of radius
``R_sim`` around the typical user, draws a fading mark per BS, serves the user
from the BS with the largest path loss gain and records SIR, SNR and SINR.

Trials are generated in fixed-size blocks.  Block ``b`` draws from a Philox
stream keyed by the seed with ``b`` in the top counter word, so any trial can
be regenerated alone and the result never depends on how blocks are spread
over threads.

Interference from beyond the window is replaced by its mean, which removes
the first-order truncation bias; the window is sized so that the standard
deviation of what was replaced is small compared with the signal or noise
level.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .analytic import CoverageResult, DomainError, Method, Metric, NetworkScenario
from .pathloss import evaluate

__all__ = [
    "Fading",
    "SimConfig",
    "TrialSamples",
    "EmpiricalCcdf",
    "truncation_bias_bound",
    "fluctuation_bound",
    "resolve_window",
    "block_size",
    "simulate",
    "sample_trial",
    "wilson_interval",
    "estimate_ccdf",
    "coverage_mc",
]

_POINTS_PER_BLOCK = 2**18
_MAX_BLOCK = 8192


class Fading(str, enum.Enum):
    RAYLEIGH = "rayleigh"
    LOGNORMAL = "lognormal"
    NONE = "none"


@dataclass(frozen=True)
class SimConfig:
    """Simulation settings.

    ``window_radius=None`` sizes the window automatically (see
    :func:`resolve_window`).  ``shadow_sigma_db`` is only used with lognormal
    fading, whose marks are normalised to unit mean.
    """

    trials: int
    seed: int = 0
    window_radius: float | None = None
    fading: Fading = Fading.RAYLEIGH
    shadow_sigma_db: float = 6.0
    confidence: float = 0.99
    fluctuation_tol: float = 1e-2
    compensate: bool = True

    def __post_init__(self):
        if int(self.trials) != self.trials or self.trials < 1:
            raise ValueError(f"trials must be a positive integer, got {self.trials}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.window_radius is not None and not (
                math.isfinite(self.window_radius) and self.window_radius > 0):
            raise ValueError(f"window_radius must be finite and > 0, got {self.window_radius}")
        object.__setattr__(self, "fading", Fading(self.fading))
        if self.shadow_sigma_db < 0:
            raise ValueError("shadow_sigma_db must be >= 0")
        if not 0 < self.confidence < 1:
            raise ValueError(f"confidence must lie in (0, 1), got {self.confidence}")
        if not self.fluctuation_tol > 0:
            raise ValueError("fluctuation_tol must be > 0")

    @property
    def _log_sigma(self) -> float:
        return self.shadow_sigma_db * math.log(10.0) / 10.0

    def fading_second_moment(self) -> float:
        if self.fading is Fading.RAYLEIGH:
            return 2.0
        if self.fading is Fading.LOGNORMAL:
            return math.exp(self._log_sigma**2)
        return 1.0


@dataclass(frozen=True)
class TrialSamples:
    """Per-trial ratios, ordered by trial index.  Zero-BS trials hold zeros."""

    sir: np.ndarray
    snr: np.ndarray
    sinr: np.ndarray
    window_radius: float

    def metric(self, metric) -> np.ndarray:
        return {"SIR": self.sir, "SNR": self.snr, "SINR": self.sinr}[Metric(_metric_name(metric)).value]


@dataclass(frozen=True)
class EmpiricalCcdf:
    thresholds: np.ndarray
    estimates: np.ndarray
    ci_halfwidths: np.ndarray
    ci_lower: np.ndarray
    ci_upper: np.ndarray
    trials_used: int

    def contains(self, values, slack: float = 0.0) -> np.ndarray:
        """Which ``values`` fall inside the Wilson intervals (widened by ``slack``)."""
        values = np.asarray(values, dtype=float)
        return (values >= self.ci_lower - slack) & (values <= self.ci_upper + slack)


def _metric_name(metric) -> str:
    name = metric.value if isinstance(metric, Metric) else str(metric)
    return name.upper()


def _check_scenario(scenario: NetworkScenario) -> None:
    if scenario.pathloss.alpha_last <= 2:
        raise DomainError(
            f"alpha_last = {scenario.pathloss.alpha_last} <= 2: interference diverges, "
            "nothing to simulate", analytic_value=0.0)


def truncation_bias_bound(scenario: NetworkScenario, window_radius: float) -> float:
    """Mean interference (unit-mean fading) from BSs beyond ``window_radius``.

    Assumes the window reaches the last segment of the path loss model.
    """
    _check_scenario(scenario)
    model = scenario.pathloss
    a = model.alpha_last
    return (2.0 * math.pi * scenario.density * model.constants[-1]
            * window_radius ** (2.0 - a) / (a - 2.0))


def fluctuation_bound(scenario: NetworkScenario, window_radius: float,
                      fading_second_moment: float = 2.0) -> float:
    """Standard deviation of the interference from BSs beyond ``window_radius``."""
    _check_scenario(scenario)
    model = scenario.pathloss
    a = model.alpha_last
    var = (math.pi * scenario.density * fading_second_moment * model.constants[-1] ** 2
           * window_radius ** (2.0 - 2.0 * a) / (a - 1.0))
    return math.sqrt(var)


def _reference_power(scenario: NetworkScenario) -> float:
    median_signal = float(evaluate(scenario.pathloss, 0.5 / math.sqrt(scenario.density)))
    return max(scenario.noise, median_signal)


def resolve_window(scenario: NetworkScenario, config: SimConfig) -> float:
    """Simulation window radius.

    An explicit radius must exceed ten times the largest of the breakpoints
    and the mean nearest-BS distance scale ``1/sqrt(lambda pi)``.  In auto mode
    the radius is the largest of twice the last breakpoint, five times
    ``1/sqrt(lambda pi)``, and the radius at which :func:`fluctuation_bound`
    falls to ``fluctuation_tol`` times the larger of the noise power and the
    median signal power ``l(0.5/sqrt(lambda))``.
    """
    _check_scenario(scenario)
    model = scenario.pathloss
    scale = 1.0 / math.sqrt(scenario.density * math.pi)
    if config.window_radius is not None:
        floor = 10.0 * max((*model.breakpoints, scale))
        if config.window_radius <= floor:
            raise ValueError(
                f"window_radius {config.window_radius} must exceed {floor:.6g} "
                "(10 x max(breakpoints, 1/sqrt(lambda pi)))")
        return float(config.window_radius)

    a = model.alpha_last
    target = config.fluctuation_tol * _reference_power(scenario)
    log_r = (math.log(math.pi * scenario.density * config.fading_second_moment()
                      * model.constants[-1] ** 2 / (a - 1.0)) - 2.0 * math.log(target)) / (2.0 * a - 2.0)
    last_bp = model.breakpoints[-1] if model.breakpoints else 0.0
    return max(2.0 * last_bp, 5.0 * scale, math.exp(log_r))


def block_size(scenario: NetworkScenario, window_radius: float) -> int:
    """Trials per block, fixed by the scenario so results do not depend on threads."""
    mean_points = scenario.density * math.pi * window_radius**2
    return int(min(_MAX_BLOCK, max(1, _POINTS_PER_BLOCK // max(1, math.ceil(mean_points)))))


def _draw_fading(rng: np.random.Generator, config: SimConfig, n: int) -> np.ndarray:
    if config.fading is Fading.RAYLEIGH:
        return rng.standard_exponential(n)
    if config.fading is Fading.LOGNORMAL:
        s = config._log_sigma
        return np.exp(s * rng.standard_normal(n) - 0.5 * s * s)
    return np.ones(n)


def _simulate_block(scenario: NetworkScenario, config: SimConfig, window: float,
                    size: int, block: int):
    rng = np.random.Generator(np.random.Philox(key=config.seed, counter=[0, 0, 0, block]))
    counts = rng.poisson(scenario.density * math.pi * window**2, size)
    total = int(counts.sum())
    # 1 - U lies in (0, 1], so no BS sits exactly on the user
    radii = window * np.sqrt(1.0 - rng.random(total))
    marks = _draw_fading(rng, config, total)

    sir = np.zeros(size)
    snr = np.zeros(size)
    sinr = np.zeros(size)
    occupied = counts > 0
    if total == 0:
        return sir, snr, sinr

    gains = evaluate(scenario.pathloss, radii)
    owner = np.repeat(np.arange(size), counts)
    starts = (np.cumsum(counts) - counts)[occupied]
    best = np.full(size, -np.inf)
    best[occupied] = np.maximum.reduceat(gains, starts)
    # first BS attaining the largest gain in each trial
    candidates = np.flatnonzero(gains == best[owner])
    _, first = np.unique(owner[candidates], return_index=True)
    serving = candidates[first]

    power = marks * gains
    signal = power[serving]
    power[serving] = 0.0
    interference = np.add.reduceat(power, starts)
    if config.compensate:
        interference = interference + truncation_bias_bound(scenario, window)

    with np.errstate(divide="ignore"):
        sir[occupied] = signal / interference
        snr[occupied] = signal / scenario.noise if scenario.noise > 0 else np.inf
        sinr[occupied] = signal / (interference + scenario.noise)
    return sir, snr, sinr


def simulate(scenario: NetworkScenario, config: SimConfig, *, threads: int = 1) -> TrialSamples:
    """Run ``config.trials`` trials; ``threads`` affects speed only, never the output."""
    window = resolve_window(scenario, config)
    size = block_size(scenario, window)
    n_blocks = -(-config.trials // size)

    def run(block):
        return _simulate_block(scenario, config, window, size, block)

    if threads > 1 and n_blocks > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, range(n_blocks)))
    else:
        parts = [run(b) for b in range(n_blocks)]
    sir, snr, sinr = (np.concatenate([p[k] for p in parts])[:config.trials] for k in range(3))
    return TrialSamples(sir, snr, sinr, window)


def sample_trial(scenario: NetworkScenario, config: SimConfig, trial_index: int):
    """``(sir, snr, sinr)`` of a single trial, identical to its entry in :func:`simulate`."""
    if not 0 <= trial_index < config.trials:
        raise IndexError(f"trial_index {trial_index} outside [0, {config.trials})")
    window = resolve_window(scenario, config)
    size = block_size(scenario, window)
    block, offset = divmod(int(trial_index), size)
    sir, snr, sinr = _simulate_block(scenario, config, window, size, block)
    return float(sir[offset]), float(snr[offset]), float(sinr[offset])


def wilson_interval(successes, trials: int, confidence: float = 0.99):
    """Wilson score interval; returns ``(lower, upper)`` arrays."""
    k = np.asarray(successes, dtype=float)
    n = float(trials)
    z = stats.norm.ppf(0.5 + 0.5 * confidence)
    p = k / n
    denom = 1.0 + z * z / n
    centre = (p + z * z / (2.0 * n)) / denom
    half = z / denom * np.sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n))
    return np.clip(centre - half, 0.0, 1.0), np.clip(centre + half, 0.0, 1.0)


def _ccdf_from_samples(values: np.ndarray, thresholds: np.ndarray, confidence: float) -> EmpiricalCcdf:
    n = values.size
    ordered = np.sort(values)
    exceed = n - np.searchsorted(ordered, thresholds, side="right")
    lower, upper = wilson_interval(exceed, n, confidence)
    return EmpiricalCcdf(thresholds, exceed / n, 0.5 * (upper - lower), lower, upper, n)


def estimate_ccdf(scenario: NetworkScenario, config: SimConfig, thresholds, metric="SINR", *,
                  threads: int = 1, samples: TrialSamples | None = None) -> EmpiricalCcdf:
    """Fraction of trials whose ``metric`` exceeds each linear threshold.

    Pass ``samples`` from :func:`simulate` to reuse one run for several metrics.
    """
    thresholds = np.asarray(thresholds, dtype=float)
    if thresholds.ndim != 1 or thresholds.size == 0:
        raise ValueError("thresholds must be a non-empty 1-d sequence")
    if np.any(np.diff(thresholds) <= 0):
        raise ValueError("thresholds must be strictly increasing")
    if config.trials < 100:
        raise ValueError(f"estimate_ccdf needs at least 100 trials, got {config.trials}")
    if samples is None:
        samples = simulate(scenario, config, threads=threads)
    return _ccdf_from_samples(samples.metric(metric), thresholds, config.confidence)


def coverage_mc(scenario: NetworkScenario, config: SimConfig, threshold: float,
                metric="SINR", *, threads: int = 1) -> CoverageResult:
    """Monte Carlo coverage at one threshold, with the CI half-width as error estimate."""
    est = estimate_ccdf(scenario, config, [threshold], metric, threads=threads)
    return CoverageResult(float(est.estimates[0]), Metric(_metric_name(metric)),
                          Method.MONTE_CARLO, float(threshold), float(est.ci_halfwidths[0]))
