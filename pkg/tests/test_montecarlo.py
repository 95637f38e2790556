import math

import numpy as np
import pytest
from scipy import stats

from multislope.analytic import DomainError, Method, Metric, NetworkScenario, coverage, sir_coverage_standard
from multislope.montecarlo import (
    Fading,
    SimConfig,
    _draw_fading,
    _simulate_block,
    block_size,
    coverage_mc,
    estimate_ccdf,
    fluctuation_bound,
    resolve_window,
    sample_trial,
    simulate,
    truncation_bias_bound,
    wilson_interval,
)
from multislope.pathloss import make_dual, make_multislope, make_standard

TWO_RAY = make_dual(2.0, 4.0, 1.0)
STD4 = 1.0 / (1.0 + math.pi / 4.0)


def sc(lam, noise, model):
    return NetworkScenario(lam, noise, model)


def test_config_validation():
    for bad in (dict(trials=0), dict(trials=2.5), dict(trials=10, seed=-1), dict(trials=10, window_radius=0.0),
                dict(trials=10, confidence=1.0), dict(trials=10, fading="rician"),
                dict(trials=10, shadow_sigma_db=-1.0), dict(trials=10, fluctuation_tol=0.0)):
        with pytest.raises(ValueError):
            SimConfig(**bad)
    assert SimConfig(10, fading="lognormal").fading is Fading.LOGNORMAL


def test_truncation_bias_examples():
    s = sc(1.0, 0.0, make_standard(4.0))
    assert truncation_bias_bound(s, 100.0) == pytest.approx(math.pi * 1e-4, rel=1e-12)
    assert truncation_bias_bound(s, 200.0) == pytest.approx(math.pi * 1e-4 / 4.0, rel=1e-12)
    assert truncation_bias_bound(sc(1.0, 0.0, make_standard(3.0)), 1000.0) == pytest.approx(
        2 * math.pi * 1e-3, rel=1e-12)
    # the far-field constant enters linearly
    s = sc(1.0, 0.0, make_dual(2.0, 4.0, 3.0))
    assert truncation_bias_bound(s, 100.0) == pytest.approx(9.0 * math.pi * 1e-4, rel=1e-12)


def test_truncation_bias_matches_mean_far_interference():
    s = sc(1.0, 0.0, make_standard(4.0))
    # E sum_{r > R} r^-4 over a PPP, by direct integration
    r = 10.0
    direct = 2 * math.pi * 1.0 * (r**-2) / 2
    assert truncation_bias_bound(s, r) == pytest.approx(direct, rel=1e-12)


def test_fluctuation_bound_decreases():
    s = sc(1.0, 0.0, TWO_RAY)
    assert fluctuation_bound(s, 100.0) > fluctuation_bound(s, 200.0) > 0
    assert fluctuation_bound(s, 100.0, 1.0) == pytest.approx(fluctuation_bound(s, 100.0, 2.0) / math.sqrt(2))


def test_diverging_interference_rejected():
    with pytest.raises(DomainError):
        simulate(sc(1.0, 0.0, make_dual(1.0, 2.0, 1.0)), SimConfig(100))


def test_explicit_window_validation():
    s = sc(1.0, 0.0, make_dual(2.0, 4.0, 3.0))
    with pytest.raises(ValueError):
        resolve_window(s, SimConfig(100, window_radius=30.0))
    assert resolve_window(s, SimConfig(100, window_radius=31.0)) == 31.0
    sparse = sc(1e-4, 0.0, TWO_RAY)
    with pytest.raises(ValueError):
        resolve_window(sparse, SimConfig(100, window_radius=500.0))


def test_auto_window_covers_breakpoints_and_scale():
    s = sc(1e-5, 1e-8, make_multislope([0.0, 2.0, 4.0], [1.0, 267.0]))
    assert resolve_window(s, SimConfig(100)) >= 2 * 267.0
    s = sc(1e-3, 0.0, TWO_RAY)
    assert resolve_window(s, SimConfig(100)) >= 5 / math.sqrt(math.pi * 1e-3)


def test_block_size_bounds():
    assert block_size(sc(1.0, 0.0, TWO_RAY), 1.0) == 8192
    assert block_size(sc(1e4, 0.0, TWO_RAY), 100.0) == 1
    assert 1 <= block_size(sc(1.0, 0.0, TWO_RAY), 100.0) < 8192


def test_noise_free_sinr_equals_sir():
    out = simulate(sc(1.0, 0.0, TWO_RAY), SimConfig(2000, seed=3))
    assert np.array_equal(out.sinr, out.sir)
    assert np.all(np.isinf(out.snr) | (out.snr == 0))


def test_sinr_never_exceeds_sir_or_snr():
    out = simulate(sc(0.3, 1.0, TWO_RAY), SimConfig(3000, seed=3))
    assert np.all(out.sinr <= out.sir)
    assert np.all(out.sinr <= out.snr)
    assert out.metric("sinr") is out.sinr and out.metric(Metric.SNR) is out.snr


def test_lone_bs_gives_infinite_sir():
    # a window holding about one BS on average
    s = sc(1e-3, 0.0, make_standard(4.0))
    sir, _, _ = _simulate_block(s, SimConfig(100, seed=1, compensate=False), 20.0, 4000, 0)
    # P(exactly one BS) = m exp(-m) with m = 0.4 pi
    m = 0.4 * math.pi
    assert np.isinf(sir).mean() == pytest.approx(m * math.exp(-m), abs=0.05)
    compensated = _simulate_block(s, SimConfig(100, seed=1), 20.0, 4000, 0)[0]
    assert np.all(np.isfinite(compensated))


def test_empty_window_gives_zero():
    s = sc(1e-3, 0.0, make_standard(4.0))
    sir, snr, sinr = _simulate_block(s, SimConfig(100), 20.0, 2000, 0)
    empty = (sir == 0)
    # P(no BS within 20) = exp(-0.4 pi)
    assert empty.mean() == pytest.approx(math.exp(-1e-3 * math.pi * 400), abs=0.05)
    assert np.all(snr[empty] == 0) and np.all(sinr[empty] == 0)


def test_determinism_across_threads_and_reruns():
    s = sc(1.0, 1.0, TWO_RAY)
    cfg = SimConfig(20000, seed=42)
    a = simulate(s, cfg, threads=1)
    b = simulate(s, cfg, threads=4)
    c = simulate(s, cfg, threads=1)
    assert a.sinr.tobytes() == b.sinr.tobytes() == c.sinr.tobytes()
    assert not np.array_equal(a.sinr, simulate(s, SimConfig(20000, seed=43)).sinr)


def test_prefix_property():
    s = sc(1.0, 1.0, TWO_RAY)
    short = simulate(s, SimConfig(1000, seed=5))
    long = simulate(s, SimConfig(30000, seed=5))
    assert np.array_equal(long.sinr[:1000], short.sinr)


def test_sample_trial_matches_simulation():
    s = sc(1.0, 1.0, TWO_RAY)
    cfg = SimConfig(20000, seed=9)
    out = simulate(s, cfg)
    for i in (0, 1, 8191, 8192, 19999):
        assert sample_trial(s, cfg, i) == (out.sir[i], out.snr[i], out.sinr[i])
    with pytest.raises(IndexError):
        sample_trial(s, cfg, 20000)


def test_wilson_interval():
    lo, hi = wilson_interval(np.array([0, 50, 100]), 100, 0.99)
    assert lo[0] == 0.0 and 0 < hi[0] < 0.1
    assert lo[1] < 0.5 < hi[1]
    assert hi[1] - 0.5 == pytest.approx(0.5 - lo[1])
    assert hi[2] == 1.0 and lo[2] > 0.9
    lo95, hi95 = wilson_interval(50, 100, 0.95)
    assert hi95 - lo95 < hi[1] - lo[1]


def test_wilson_coverage_rate():
    rng = np.random.default_rng(0)
    k = rng.binomial(400, 0.3, 4000)
    lo, hi = wilson_interval(k, 400, 0.95)
    assert 0.93 <= np.mean((lo <= 0.3) & (0.3 <= hi)) <= 0.97


def test_estimate_ccdf_errors():
    s = sc(1.0, 0.0, TWO_RAY)
    with pytest.raises(ValueError):
        estimate_ccdf(s, SimConfig(99), [1.0])
    with pytest.raises(ValueError):
        estimate_ccdf(s, SimConfig(1000), [1.0, 1.0])
    with pytest.raises(ValueError):
        estimate_ccdf(s, SimConfig(1000), [])


def test_tiny_threshold_covers_nearly_everyone():
    est = estimate_ccdf(sc(1.0, 0.0, TWO_RAY), SimConfig(10000, seed=2), [1e-12])
    assert est.estimates[0] == pytest.approx(1.0, abs=1e-3)


def test_estimates_are_non_increasing():
    ts = np.logspace(-2, 2, 30)
    est = estimate_ccdf(sc(1.0, 1.0, TWO_RAY), SimConfig(5000, seed=2), ts)
    assert np.all(np.diff(est.estimates) <= 0)
    assert np.all(est.ci_lower <= est.estimates) and np.all(est.estimates <= est.ci_upper)
    assert est.trials_used == 5000


def test_standard_model_matches_closed_form():
    est = estimate_ccdf(sc(1.0, 0.0, make_standard(4.0)), SimConfig(100_000, seed=7), [1.0], "SIR")
    assert est.contains([STD4])[0]


def test_density_rescaling_of_standard_model():
    for lam in (0.01, 30.0):
        est = estimate_ccdf(sc(lam, 0.0, make_standard(3.5)), SimConfig(20_000, seed=1), [1.0], "SIR")
        assert est.contains([sir_coverage_standard(3.5, 1.0)])[0]


def test_coverage_mc_result():
    s = sc(1.0, 1.0, TWO_RAY)
    res = coverage_mc(s, SimConfig(50_000, seed=6), 1.0)
    assert res.method is Method.MONTE_CARLO and res.metric is Metric.SINR
    assert abs(res.value - coverage(s, 1.0).value) <= res.error_estimate


def test_lognormal_marks_have_unit_mean():
    rng = np.random.Generator(np.random.Philox(0))
    cfg = SimConfig(100, fading=Fading.LOGNORMAL, shadow_sigma_db=6.0)
    marks = _draw_fading(rng, cfg, 400_000)
    assert marks.mean() == pytest.approx(1.0, abs=0.01)
    sigma = 6.0 * math.log(10) / 10
    exact = stats.lognorm(s=sigma, scale=math.exp(-sigma**2 / 2)).moment(2)
    assert cfg.fading_second_moment() == pytest.approx(exact, rel=1e-12)
    log_sd = np.std(np.log(marks))
    assert log_sd == pytest.approx(6.0 * math.log(10) / 10, rel=0.01)


def test_rayleigh_marks_are_exponential():
    rng = np.random.Generator(np.random.Philox(1))
    marks = _draw_fading(rng, SimConfig(100), 50_000)
    assert stats.kstest(marks, "expon").pvalue > 1e-3
    assert np.all(_draw_fading(rng, SimConfig(100, fading="none"), 10) == 1.0)

