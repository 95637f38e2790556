"""Coverage probability of the typical user in a Poisson downlink network.

All integrals over the squared serving distance ``y`` are taken in the
variable ``u = lambda*pi*y`` (the mean number of BSs closer than the serving
one).  Every integrand is bounded by ``exp(-u)``, so the semi-infinite range
is cut at ``U_MAX`` with a tail error below ``exp(-U_MAX)`` at any density,
and the mass of the integrand always sits at ``u = O(1)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate as sp_integrate
from scipy import special

from .pathloss import PathLossModel
from .quadrature import ConvergenceError, integrate
from .specfun import CONSTANTS, c_beta, c_beta_minus_one, exp_integral_e1

__all__ = [
    "Metric",
    "Method",
    "DomainError",
    "ConvergenceError",
    "NetworkScenario",
    "CoverageResult",
    "CcdfCurve",
    "db_to_linear",
    "linear_to_db",
    "sir_coverage_standard",
    "integrand_I",
    "coverage_general",
    "coverage_dual",
    "coverage_tworay",
    "coverage_snr",
    "coverage_snr_tworay",
    "coverage_sinr_lower_bound_tworay",
    "coverage_multislope",
    "coverage",
    "coverage_sir",
    "ccdf",
    "coverage_density",
    "potential_throughput",
]

U_MAX = 50.0
DUAL_TOL = 1e-7
GENERAL_TOL = 1e-6
_U_GRID = tuple(10.0**k for k in range(-8, 2))


class Metric(str, enum.Enum):
    SIR = "SIR"
    SNR = "SNR"
    SINR = "SINR"


class Method(str, enum.Enum):
    GENERAL = "general-integral"
    DUAL = "dual-slope"
    TWORAY = "two-ray-closed"
    SNR_INTEGRAL = "snr-integral"
    SNR_CLOSED = "snr-closed"
    LOWER_BOUND = "lower-bound"
    MULTISLOPE = "multislope"
    MONTE_CARLO = "monte-carlo"


class DomainError(ValueError):
    """Inputs outside a formula's domain.

    ``analytic_value`` carries the known answer when one exists, e.g. zero
    coverage when the aggregate interference diverges.
    """

    def __init__(self, message: str, analytic_value: float | None = None):
        super().__init__(message)
        self.analytic_value = analytic_value


def db_to_linear(t_db):
    if np.ndim(t_db):
        return 10.0 ** (np.asarray(t_db, dtype=float) / 10.0)
    return 10.0 ** (float(t_db) / 10.0)


def linear_to_db(t):
    if np.ndim(t):
        return 10.0 * np.log10(np.asarray(t, dtype=float))
    return 10.0 * math.log10(t)


@dataclass(frozen=True)
class NetworkScenario:
    density: float
    noise: float
    pathloss: PathLossModel

    def __post_init__(self):
        if not (math.isfinite(self.density) and self.density > 0):
            raise ValueError(f"density must be finite and > 0, got {self.density}")
        if not (math.isfinite(self.noise) and self.noise >= 0):
            raise ValueError(f"noise must be finite and >= 0, got {self.noise}")

    def with_density(self, density: float) -> "NetworkScenario":
        return NetworkScenario(density, self.noise, self.pathloss)

    def with_noise(self, noise: float) -> "NetworkScenario":
        return NetworkScenario(self.density, noise, self.pathloss)


@dataclass(frozen=True)
class CoverageResult:
    value: float
    metric: Metric
    method: Method
    threshold: float
    error_estimate: float = 0.0

    def __post_init__(self):
        if not -1e-12 <= self.value <= 1 + 1e-12:
            raise ValueError(f"coverage must lie in [0, 1], got {self.value}")
        object.__setattr__(self, "value", min(1.0, max(0.0, float(self.value))))
        if self.error_estimate < 0:
            raise ValueError("error_estimate must be >= 0")


@dataclass(frozen=True)
class CcdfCurve:
    thresholds: tuple[float, ...]
    points: tuple[CoverageResult, ...]

    def __post_init__(self):
        if len(self.thresholds) != len(self.points):
            raise ValueError("thresholds and points must align")
        if any(b <= a for a, b in zip(self.thresholds, self.thresholds[1:])):
            raise ValueError("thresholds must be strictly increasing")

    @property
    def values(self) -> np.ndarray:
        return np.array([p.value for p in self.points])


def _check_threshold(threshold: float) -> float:
    threshold = float(threshold)
    if not (math.isfinite(threshold) and threshold > 0):
        raise ValueError(f"threshold must be finite and > 0 (linear), got {threshold}")
    return threshold


def _check_interference_finite(model: PathLossModel) -> None:
    if model.alpha_last <= 2:
        raise DomainError(
            f"alpha_last = {model.alpha_last} <= 2: aggregate interference diverges, "
            "SIR and SINR coverage are 0",
            analytic_value=0.0,
        )


def _interference_metric(scenario: NetworkScenario) -> Metric:
    return Metric.SINR if scenario.noise > 0 else Metric.SIR


def _split_points(lo: float, hi: float, extra=()) -> list[float]:
    return [p for p in (*_U_GRID, *extra) if lo < p < hi]


def _delta(alpha: float) -> float:
    return math.inf if alpha == 0 else 2.0 / alpha


def sir_coverage_standard(alpha: float, threshold: float) -> float:
    """SIR coverage under ``d**-alpha`` (density independent), ``1/C_{-2/alpha}(T)``."""
    if alpha <= 2:
        raise DomainError(f"standard model needs alpha > 2 for finite interference, got {alpha}", 0.0)
    return 1.0 / c_beta(-2.0 / alpha, _check_threshold(threshold))


# --- general path loss: nested quadrature, used as an independent check -------------


def _ratio_pieces(model: PathLossModel, y: float):
    """Pieces ``(t_lo, t_hi, c, p)`` with ``l(sqrt y)/l(sqrt(t y)) = c t**p`` on each."""
    m = model.segment(math.sqrt(y))
    k_m, a_m = model.constants[m], model.exponents[m]
    edges = [1.0] + [r * r / y for r in model.breakpoints[m:]] + [math.inf]
    pieces = []
    for n in range(m, model.n_slopes):
        t_lo, t_hi = edges[n - m], edges[n - m + 1]
        a_n = model.exponents[n]
        c = k_m / model.constants[n] * y ** (0.5 * (a_n - a_m))
        pieces.append((t_lo, t_hi, c, 0.5 * a_n))
    return pieces, k_m * y ** (-0.5 * a_m)


def coverage_general(scenario: NetworkScenario, threshold: float) -> CoverageResult:
    """Coverage for an arbitrary path loss model by direct double quadrature.

    Evaluates ``int exp(-u (1 + J(y)) - T s2/l(sqrt y)) du`` with ``y = u/(lambda pi)``
    and ``J(y) = int_1^inf T/(T + l(sqrt y)/l(sqrt(t y))) dt``, both levels by
    QUADPACK and the inner integral split where ``sqrt(t y)`` crosses a breakpoint.
    """
    t = _check_threshold(threshold)
    model = scenario.pathloss
    _check_interference_finite(model)
    lam_pi = scenario.density * math.pi

    def inner(y):
        pieces, gain = _ratio_pieces(model, y)
        total = 0.0
        for t_lo, t_hi, c, p in pieces:
            # s = exp(v): the pieces can span many decades of t
            def f(v, c=c, p=p):
                return t / (t * math.exp(-v) + c * math.exp(min((p - 1.0) * v, 700.0)))

            v_hi = math.log(t_hi) if math.isfinite(t_hi) else math.inf
            val, _ = sp_integrate.quad(f, math.log(t_lo), v_hi, epsabs=1e-11, epsrel=1e-11, limit=200)
            total += val
        return total, gain

    def outer(u):
        y = u / lam_pi
        j, gain = inner(y)
        return math.exp(-u * (1.0 + j) - t * scenario.noise / gain)

    edges = [0.0] + [lam_pi * r * r for r in model.breakpoints if lam_pi * r * r < U_MAX] + [U_MAX]
    value, error = 0.0, 0.0
    for lo, hi in zip(edges, edges[1:]):
        pts = _split_points(lo, hi)
        val, err = sp_integrate.quad(outer, lo, hi, points=pts or None, epsabs=0.1 * GENERAL_TOL,
                                     epsrel=1e-10, limit=400)
        value += val
        error += err
    if error > GENERAL_TOL:
        raise ConvergenceError(f"general coverage integral error {error:.2e} exceeds {GENERAL_TOL}")
    return CoverageResult(value, _interference_metric(scenario), Method.GENERAL, t,
                          error + math.exp(-U_MAX))


# --- dual slope --------------------------------------------------------------------


def integrand_I(delta0: float, delta1: float, threshold: float, x):
    """Interference functional of the dual-slope coverage integral on ``x in (0, 1]``.

    ``x`` is the squared serving distance in units of ``R_c**2``; ``delta0 = inf``
    encodes a zero near-field exponent.
    """
    t = _check_threshold(threshold)
    if not (delta0 > 0 and 0 < delta1 < 1):
        raise ValueError(f"need delta0 in (0, inf] and delta1 in (0, 1), got {delta0}, {delta1}")
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0) or np.any(x > 1):
        raise ValueError("integrand_I is defined for x in (0, 1]")
    xp = np.ones_like(x) if delta0 == math.inf else x ** (1.0 / delta0)
    out = (c_beta(delta0, 1.0 / (t * xp)) + c_beta_minus_one(-delta1, t * xp)
           + x * (1.0 - c_beta(delta0, 1.0 / t)))
    return float(out) if out.ndim == 0 else out


def _dual_parameters(scenario: NetworkScenario, exponents=None):
    model = scenario.pathloss
    if model.n_slopes != 2:
        raise DomainError(f"dual-slope formula needs a 2-slope model, got {model.n_slopes} slopes")
    if exponents is not None and model.exponents != exponents:
        raise DomainError(f"formula requires exponents {exponents}, got {model.exponents}")
    a0, a1 = model.exponents
    return a0, a1, model.breakpoints[0]


def _near_far_integrals(big_lambda, near_exponent, far_exponent, tol):
    """Integrate over ``u`` in ``(0, big_lambda)`` and ``(big_lambda, U_MAX)``."""
    value, error = 0.0, 0.0
    split = min(big_lambda, U_MAX)
    res = integrate(near_exponent, 0.0, split, points=_split_points(0.0, split),
                    epsabs=0.5 * tol, epsrel=1e-10)
    value += res.value
    error += res.error
    if big_lambda < U_MAX:
        res = integrate(far_exponent, big_lambda, U_MAX, points=_split_points(big_lambda, U_MAX),
                        epsabs=0.5 * tol, epsrel=1e-10)
        value += res.value
        error += res.error
    return value, error + math.exp(-U_MAX)


def coverage_dual(scenario: NetworkScenario, threshold: float) -> CoverageResult:
    """SINR (SIR when noise is 0) coverage under the dual-slope model."""
    t = _check_threshold(threshold)
    a0, a1, r_c = _dual_parameters(scenario)
    _check_interference_finite(scenario.pathloss)
    d0, d1 = _delta(a0), _delta(a1)
    big = scenario.density * math.pi * r_c * r_c
    noise = t * scenario.noise * r_c**a0
    c_far = c_beta(-d1, t)

    def near(u):
        x = u / big
        return np.exp(-big * integrand_I(d0, d1, t, x) - noise * x ** (0.5 * a0))

    def far(u):
        return np.exp(-u * c_far - noise * (u / big) ** (0.5 * a1))

    value, error = _near_far_integrals(big, near, far, DUAL_TOL)
    return CoverageResult(value, _interference_metric(scenario), Method.DUAL, t, error)


def _tworay_I(t, x):
    xt = x * t
    s = np.sqrt(xt)
    return xt * np.log1p(1.0 / xt) + s * np.arctan(s) + x * (1.0 - t * math.log1p(1.0 / t))


def coverage_tworay(scenario: NetworkScenario, threshold: float) -> CoverageResult:
    """Dual-slope coverage specialised to exponents (2, 4) with elementary functions only."""
    t = _check_threshold(threshold)
    _, _, r_c = _dual_parameters(scenario, (2.0, 4.0))
    big = scenario.density * math.pi * r_c * r_c
    noise = t * scenario.noise * r_c * r_c
    c_far = 1.0 + math.sqrt(t) * math.atan(math.sqrt(t))

    def near(u):
        x = u / big
        return np.exp(-big * _tworay_I(t, x) - noise * x)

    def far(u):
        x = u / big
        return np.exp(-u * c_far - noise * x * x)

    value, error = _near_far_integrals(big, near, far, DUAL_TOL)
    return CoverageResult(value, _interference_metric(scenario), Method.TWORAY, t, error)


# --- SNR ---------------------------------------------------------------------------


def coverage_snr(scenario: NetworkScenario, threshold: float) -> CoverageResult:
    """SNR coverage, one integral per path loss segment (exactly 1 without noise).

    With two slopes these are the near-field and far-field integrals of the
    dual-slope SNR formula.
    """
    t = _check_threshold(threshold)
    if scenario.noise == 0:
        return CoverageResult(1.0, Metric.SNR, Method.SNR_INTEGRAL, t, 0.0)
    model = scenario.pathloss
    lam_pi = scenario.density * math.pi
    tn = t * scenario.noise
    edges = [0.0] + [lam_pi * r * r for r in model.breakpoints] + [math.inf]
    value, error = 0.0, math.exp(-U_MAX)
    for i in range(model.n_slopes):
        lo, hi = edges[i], min(edges[i + 1], U_MAX)
        if lo >= U_MAX:
            break

        def seg(u, i=i):
            return np.exp(-u - tn * (u / lam_pi) ** (0.5 * model.exponents[i]) / model.constants[i])

        res = integrate(seg, lo, hi, points=_split_points(lo, hi),
                        epsabs=0.5 * DUAL_TOL / model.n_slopes, epsrel=1e-10)
        value += res.value
        error += res.error
    return CoverageResult(value, Metric.SNR, Method.SNR_INTEGRAL, t, error)


def _log_half_erfcx(x):
    # log(Q(x)) + x^2/2, finite for large x
    return math.log(0.5 * float(special.erfcx(x / math.sqrt(2.0))))


def coverage_snr_tworay(scenario: NetworkScenario, threshold: float) -> CoverageResult:
    """Closed-form SNR coverage for exponents (2, 4)."""
    t = _check_threshold(threshold)
    _, _, r_c = _dual_parameters(scenario, (2.0, 4.0))
    if scenario.noise <= 0:
        raise DomainError("closed-form SNR coverage needs noise > 0 (it is 1 without noise)", 1.0)
    lam_pi = scenario.density * math.pi
    tn = t * scenario.noise
    first = lam_pi / (lam_pi + tn) * -math.expm1(-(lam_pi + tn) * r_c * r_c)
    # exp(A) Q(B) with A - B^2/2 = -(lam_pi + tn) r_c^2; both are huge for small tn
    b = (lam_pi + 2.0 * tn) * r_c / math.sqrt(2.0 * tn)
    log_second = (math.log(lam_pi * math.pi**0.5 * r_c / math.sqrt(tn))
                  - (lam_pi + tn) * r_c * r_c + _log_half_erfcx(b))
    value = first + math.exp(log_second)
    return CoverageResult(value, Metric.SNR, Method.SNR_CLOSED, t, 0.0)


# --- closed-form SINR lower bound, exponents (2, 4) ---------------------------------


def coverage_sinr_lower_bound_tworay(scenario: NetworkScenario, threshold: float) -> CoverageResult:
    """Closed-form lower bound on SINR coverage for exponents (2, 4).

    The far part (serving BS beyond ``R_c``) is exact.  The near part bounds
    ``T/(T+t) <= T/t`` inside the interference integral and then applies
    Jensen's inequality to ``exp(c X log X)`` with ``X`` exponential on
    ``(0, 1)``, which gives::

        (lam pi/rho0)(1 - e^-b) exp((lam pi T/rho0)(1 - (g + log b + E1(b))/(1 - e^-b)))

    with ``rho0 = lam pi (1+T) + T s2``, ``b = rho0 R_c^2`` and ``g`` the
    Euler-Mascheroni constant.
    """
    t = _check_threshold(threshold)
    _, _, r_c = _dual_parameters(scenario, (2.0, 4.0))
    if scenario.noise <= 0:
        raise DomainError("the closed-form lower bound needs noise > 0")
    lam_pi = scenario.density * math.pi
    tn = t * scenario.noise
    rho0 = lam_pi * (1.0 + t) + tn
    b = rho0 * r_c * r_c
    one_minus = -math.expm1(-b)
    jensen = 1.0 - (CONSTANTS.euler_mascheroni + math.log(b) + exp_integral_e1(b)) / one_minus
    near = lam_pi / rho0 * one_minus * math.exp(lam_pi * t / rho0 * jensen)

    c_half = 1.0 + math.sqrt(t) * math.atan(math.sqrt(t))
    rho1 = lam_pi * r_c / math.sqrt(tn)
    arg = rho1 * c_half / math.sqrt(2.0) + math.sqrt(2.0 * tn) * r_c
    log_far = (0.5 * math.log(math.pi) + math.log(rho1) - c_half * lam_pi * r_c * r_c - tn * r_c * r_c
               + _log_half_erfcx(arg))
    value = near + math.exp(log_far)
    return CoverageResult(value, _interference_metric(scenario), Method.LOWER_BOUND, t, 0.0)


# --- N slopes ----------------------------------------------------------------------


def _c_arg(log_value):
    return np.exp(np.minimum(log_value, 690.0))


def _multislope_I(model: PathLossModel, i: int, t: float, x):
    """Interference functional for a serving distance in segment ``i``; ``x`` is ``y``."""
    a, r, k = model.exponents, model.breakpoints, model.constants
    deltas = model.deltas
    last = model.n_slopes - 1
    log_t = math.log(t)
    log_x = np.log(x)
    half_ai = 0.5 * a[i]
    out = x * (1.0 - c_beta(deltas[i], 1.0 / t))
    r_next = r[i]  # R_{i+1}
    out = out + r_next**2 * c_beta(deltas[i], _c_arg(a[i] * math.log(r_next) - log_t - half_ai * log_x))
    log_ki = math.log(k[i])
    for j in range(i + 1, last):
        ratio = log_ki - math.log(k[j])
        for r_edge, sign in ((r[j], 1.0), (r[j - 1], -1.0)):
            z = _c_arg(ratio + a[j] * math.log(r_edge) - log_t - half_ai * log_x)
            out = out + sign * r_edge**2 * c_beta(deltas[j], z)
    r_last = r[last - 1]
    z = _c_arg(math.log(k[last]) - log_ki + log_t + half_ai * log_x - a[last] * math.log(r_last))
    out = out + r_last**2 * c_beta_minus_one(-deltas[last], z)
    return out


def coverage_multislope(scenario: NetworkScenario, threshold: float) -> CoverageResult:
    """SINR coverage under an N-slope model, segment by segment of the serving distance.

    Works for any exponent ordering (nearest-distance association); for
    ``N = 1`` it reduces to the standard model with noise.
    """
    t = _check_threshold(threshold)
    model = scenario.pathloss
    _check_interference_finite(model)
    lam_pi = scenario.density * math.pi
    a, k = model.exponents, model.constants
    tn = t * scenario.noise
    edges_u = [0.0] + [lam_pi * r * r for r in model.breakpoints]

    value, error = 0.0, math.exp(-U_MAX)
    tol = GENERAL_TOL / model.n_slopes
    for i in range(model.n_slopes - 1):
        lo, hi = edges_u[i], min(edges_u[i + 1], U_MAX)
        if lo >= U_MAX:
            break

        def seg(u, i=i):
            x = u / lam_pi
            return np.exp(-lam_pi * _multislope_I(model, i, t, x) - tn * x ** (0.5 * a[i]) / k[i])

        res = integrate(seg, lo, hi, points=_split_points(lo, hi), epsabs=tol, epsrel=1e-10)
        value += res.value
        error += res.error

    lo = edges_u[-1]
    if lo < U_MAX:
        c_tail = c_beta(-model.deltas[-1], t)

        def tail(u):
            x = u / lam_pi
            return np.exp(-u * c_tail - tn * x ** (0.5 * a[-1]) / k[-1])

        res = integrate(tail, lo, U_MAX, points=_split_points(lo, U_MAX), epsabs=tol, epsrel=1e-10)
        value += res.value
        error += res.error
    return CoverageResult(value, _interference_metric(scenario), Method.MULTISLOPE, t, error)


# --- dispatch and derived metrics ---------------------------------------------------


def coverage(scenario: NetworkScenario, threshold: float) -> CoverageResult:
    """SINR coverage by the cheapest exact formula for the model at hand."""
    if scenario.pathloss.n_slopes == 2:
        return coverage_dual(scenario, threshold)
    return coverage_multislope(scenario, threshold)


def coverage_sir(scenario: NetworkScenario, threshold: float) -> CoverageResult:
    return coverage(scenario.with_noise(0.0), threshold)


def ccdf(scenario: NetworkScenario, thresholds, method=coverage) -> CcdfCurve:
    """Evaluate ``method`` on increasing linear ``thresholds``."""
    thresholds = tuple(float(t) for t in thresholds)
    return CcdfCurve(thresholds, tuple(method(scenario, t) for t in thresholds))


def coverage_density(scenario: NetworkScenario, threshold: float) -> float:
    """BSs per unit area that cover their typical user: ``lambda * P``."""
    return scenario.density * coverage(scenario, threshold).value


def potential_throughput(scenario: NetworkScenario, threshold: float) -> float:
    """``log2(1 + T) * lambda * P`` in bps/Hz per unit area."""
    return math.log2(1.0 + threshold) * coverage_density(scenario, threshold)
