"""Cross-module property suites.

Each suite evaluates one property on a fixed grid and returns a
:class:`PropertyCheck` with the grid size and the worst-case margin, where a
margin ``>= 0`` means the property holds at every grid point.  Suites that
simulate take a seed and a trial count; their outcome is deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import (
    NetworkScenario,
    coverage,
    coverage_dual,
    coverage_multislope,
    coverage_sinr_lower_bound_tworay,
    coverage_snr,
    db_to_linear,
    sir_coverage_standard,
)
from .montecarlo import Fading, SimConfig, estimate_ccdf, simulate
from .pathloss import make_dual, make_standard

__all__ = ["PropertyCheck", "SUITES", "ALIASES", "run_suite", "suite_names"]


@dataclass(frozen=True)
class PropertyCheck:
    name: str
    grid_size: int
    worst_margin: float

    def __post_init__(self):
        object.__setattr__(self, "grid_size", int(self.grid_size))
        object.__setattr__(self, "worst_margin", float(self.worst_margin))

    @property
    def passed(self) -> bool:
        return self.worst_margin >= 0


FIG4_DENSITIES = (0.1, 1.0, 10.0)
FIG4_T_DB = tuple(np.linspace(-20.0, 20.0, 41))
FIG3_DENSITIES = tuple(np.logspace(-3, 2, 11))
FIG3_T_DB = (-10.0, 0.0, 10.0)


def _ordering_grid():
    return np.logspace(-3, 3, 20), db_to_linear(np.linspace(-10.0, 10.0, 20))


def ordering(**_) -> PropertyCheck:
    """Standard(a1) >= dual(a0, a1) >= standard(a0) for SIR, dual (3, 4, 1)."""
    model = make_dual(3.0, 4.0, 1.0)
    lams, ts = _ordering_grid()
    worst = math.inf
    for t in ts:
        upper, lower = sir_coverage_standard(4.0, t), sir_coverage_standard(3.0, t)
        for lam in lams:
            p = coverage_dual(NetworkScenario(lam, 0.0, model), t).value
            worst = min(worst, upper - p + 1e-9, p - lower + 1e-9)
    return PropertyCheck("sir-ordering", lams.size * ts.size, worst)


def density_monotone(**_) -> PropertyCheck:
    """SIR coverage of dual (3, 4, 1) is non-increasing in density."""
    model = make_dual(3.0, 4.0, 1.0)
    lams, ts = _ordering_grid()
    worst = math.inf
    for t in ts:
        p = np.array([coverage_dual(NetworkScenario(lam, 0.0, model), t).value for lam in lams])
        worst = min(worst, float(np.min(p[:-1] - p[1:])) + 1e-9)
    return PropertyCheck("sir-density-monotone", lams.size * ts.size, worst)


def near_field_invariance(seed: int = 0, **_) -> PropertyCheck:
    """SIR coverage depends on (lambda, R_c) only through lambda R_c^2."""
    rng = np.random.default_rng(seed)
    worst = math.inf
    pairs = 50
    for _ in range(pairs):
        a0 = rng.uniform(0.0, 4.0)
        a1 = rng.uniform(max(a0, 2.2), 6.0)
        lam, r_c = 10.0 ** rng.uniform(-2, 2), 10.0 ** rng.uniform(-1, 1)
        scale = 10.0 ** rng.uniform(-1, 1)
        t = 10.0 ** rng.uniform(-1, 1)
        p1 = coverage_dual(NetworkScenario(lam, 0.0, make_dual(a0, a1, r_c)), t).value
        p2 = coverage_dual(NetworkScenario(lam / scale**2, 0.0, make_dual(a0, a1, r_c * scale)), t).value
        worst = min(worst, 1e-6 - abs(p1 - p2))
    return PropertyCheck("near-field-invariance", pairs, worst)


def dense_decay(**_) -> PropertyCheck:
    """For a0 in {1, 2}: coverage at lambda = 1e4 below 5% of lambda = 1, strictly decreasing."""
    lams = np.logspace(0, 4, 9)
    worst = math.inf
    for a0 in (1.0, 2.0):
        model = make_dual(a0, 4.0, 1.0)
        p = np.array([coverage_dual(NetworkScenario(lam, 0.0, model), 1.0).value for lam in lams])
        worst = min(worst, 0.05 * p[0] - p[-1], float(np.min(p[:-1] - p[1:])))
    return PropertyCheck("dense-decay", 2 * lams.size, worst)


def limits(**_) -> PropertyCheck:
    """Sparse limit is standard(a1); dense limit is standard(a0) when a0 > 2."""
    worst = math.inf
    count = 0
    for a0 in (0.0, 1.0, 2.0, 3.0, 3.5):
        model = make_dual(a0, 4.0, 1.0)
        sparse = coverage_dual(NetworkScenario(1e-5, 0.0, model), 1.0).value
        worst = min(worst, 1e-3 - abs(sparse - sir_coverage_standard(4.0, 1.0)))
        count += 1
        if a0 > 2:
            dense = coverage_dual(NetworkScenario(1e5, 0.0, model), 1.0).value
            worst = min(worst, 1e-3 - abs(dense - sir_coverage_standard(a0, 1.0)))
            count += 1
    return PropertyCheck("density-limits", count, worst)


def lower_bound(**_) -> PropertyCheck:
    """Closed-form bound <= exact on the (2, 4, 1), noise 1 ccdf grid; 2% gap at low T."""
    model = make_dual(2.0, 4.0, 1.0)
    worst = math.inf
    for lam in FIG4_DENSITIES:
        sc = NetworkScenario(lam, 1.0, model)
        for t in db_to_linear(np.array(FIG4_T_DB)):
            gap = coverage_dual(sc, t).value - coverage_sinr_lower_bound_tworay(sc, t).value
            worst = min(worst, gap + 1e-9)
    sc = NetworkScenario(0.1, 1.0, model)
    exact = coverage_dual(sc, 1e-3).value
    rel = (exact - coverage_sinr_lower_bound_tworay(sc, 1e-3).value) / exact
    worst = min(worst, 0.02 - rel)
    return PropertyCheck("lower-bound", len(FIG4_DENSITIES) * len(FIG4_T_DB) + 1, worst)


def reduction(seed: int = 0, **_) -> PropertyCheck:
    """The N-slope formula with two slopes equals the dual-slope formula."""
    rng = np.random.default_rng(seed)
    worst = math.inf
    cases = 100
    for _ in range(cases):
        a0 = rng.uniform(0.0, 4.0)
        a1 = rng.uniform(max(a0, 2.2), 6.0)
        sc = NetworkScenario(10.0 ** rng.uniform(-3, 2), 10.0 ** rng.uniform(-3, 1) * rng.integers(0, 2),
                             make_dual(a0, a1, 10.0 ** rng.uniform(-1, 1)))
        t = 10.0 ** rng.uniform(-1.5, 1.5)
        diff = abs(coverage_dual(sc, t).value - coverage_multislope(sc, t).value)
        worst = min(worst, 1e-6 - diff)
    return PropertyCheck("two-slope-reduction", cases, worst)


def sandwich(**_) -> PropertyCheck:
    """min(SIR, SNR) coverage upper-bounds SINR coverage, (2, 4, 1) with noise 1."""
    model = make_dual(2.0, 4.0, 1.0)
    worst = math.inf
    for lam in FIG3_DENSITIES:
        sc = NetworkScenario(lam, 1.0, model)
        for t in db_to_linear(np.array(FIG3_T_DB)):
            sinr = coverage(sc, t).value
            bound = min(coverage(sc.with_noise(0.0), t).value, coverage_snr(sc, t).value)
            worst = min(worst, bound - sinr + 1e-9)
    return PropertyCheck("sir-snr-sandwich", len(FIG3_DENSITIES) * len(FIG3_T_DB), worst)


def mc_oracle(seed: int = 0, trials: int = 20_000, threads: int = 1, **_) -> PropertyCheck:
    """Analytic SINR ccdf inside the 99% Monte Carlo interval at >= 95% of points."""
    model = make_dual(2.0, 4.0, 1.0)
    ts = db_to_linear(np.array(FIG4_T_DB))
    hits, total = 0, 0
    for lam in FIG4_DENSITIES:
        sc = NetworkScenario(lam, 1.0, model)
        est = estimate_ccdf(sc, SimConfig(trials, seed=seed), ts, "SINR", threads=threads)
        exact = [coverage_dual(sc, t).value for t in ts]
        hits += int(np.sum(est.contains(exact)))
        total += ts.size
    return PropertyCheck("mc-oracle", total, hits / total - 0.95)


def _joint_margin(a, b) -> float:
    return float(np.min(a.ci_halfwidths + b.ci_halfwidths - np.abs(a.estimates - b.estimates)))


def mc_rescaling(seed: int = 0, trials: int = 20_000, threads: int = 1, **_) -> PropertyCheck:
    """Simulated SIR ccdf is unchanged by lambda -> lambda/a^2, R_c -> a R_c."""
    ts = db_to_linear(np.linspace(-10.0, 10.0, 9))
    worst = math.inf
    for a0, lam, a in ((2.0, 1.0, 3.0), (3.0, 0.5, 0.5)):
        first = NetworkScenario(lam, 0.0, make_dual(a0, 4.0, 1.0))
        second = NetworkScenario(lam / a**2, 0.0, make_dual(a0, 4.0, a))
        e1 = estimate_ccdf(first, SimConfig(trials, seed=seed), ts, "SIR", threads=threads)
        e2 = estimate_ccdf(second, SimConfig(trials, seed=seed + 1), ts, "SIR", threads=threads)
        worst = min(worst, _joint_margin(e1, e2))
    return PropertyCheck("mc-density-rescaling", 2 * ts.size, worst)


def general_fading(seed: int = 0, trials: int = 20_000, threads: int = 1, **_) -> PropertyCheck:
    """The SIR ordering survives lognormal fading, up to the Monte Carlo intervals."""
    ts = db_to_linear(np.linspace(-10.0, 10.0, 9))
    models = (make_standard(4.0), make_dual(3.0, 4.0, 1.0), make_standard(3.0))
    worst = math.inf
    for k, lam in enumerate((0.1, 1.0, 10.0)):
        est = []
        for j, model in enumerate(models):
            cfg = SimConfig(trials, seed=seed + 3 * k + j, fading=Fading.LOGNORMAL, shadow_sigma_db=6.0)
            samples = simulate(NetworkScenario(lam, 0.0, model), cfg, threads=threads)
            est.append(estimate_ccdf(None, cfg, ts, "SIR", samples=samples))
        for hi, lo in ((est[0], est[1]), (est[1], est[2])):
            worst = min(worst, float(np.min(hi.ci_upper - lo.ci_lower)))
    return PropertyCheck("general-fading-ordering", 3 * ts.size, worst)


SUITES = {
    "ordering": ordering,
    "density-monotone": density_monotone,
    "near-field-invariance": near_field_invariance,
    "dense-decay": dense_decay,
    "limits": limits,
    "lower-bound": lower_bound,
    "reduction": reduction,
    "sandwich": sandwich,
    "mc-oracle": mc_oracle,
    "mc-rescaling": mc_rescaling,
    "general-fading": general_fading,
}

# short names accepted on the command line
ALIASES = {
    "theorem2": "ordering",
    "lemma7": "density-monotone",
    "fact1": "near-field-invariance",
    "prop1": "dense-decay",
    "lemma5": "limits",
    "prop2-bound": "lower-bound",
}


def suite_names() -> list[str]:
    return [*SUITES, *ALIASES, "analytic", "all"]


def run_suite(name: str, *, seed: int = 0, trials: int = 20_000, threads: int = 1) -> list[PropertyCheck]:
    """Run one suite, ``analytic`` (every deterministic suite) or ``all``."""
    name = ALIASES.get(name, name)
    if name == "all":
        selected = list(SUITES)
    elif name == "analytic":
        selected = [s for s in SUITES if not s.startswith(("mc-", "general-"))]
    elif name in SUITES:
        selected = [name]
    else:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(suite_names())}")
    return [SUITES[s](seed=seed, trials=trials, threads=threads) for s in selected]
