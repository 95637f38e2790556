"""Special functions used by the coverage formulas.

The interference kernel ``C_beta(x) = 2F1(1, beta; 1 + beta; -x)`` is evaluated
here from scratch.  Three regimes are used:

* ``x <= 0.5``: the defining power series ``sum_n beta/(beta+n) (-x)^n``.
* ``0.5 < x <= 2``: Pfaff's transformation, ``C_beta(x) = F(1, 1; 1+beta; w)/(1+x)``
  with ``w = x/(1+x) <= 2/3``.
* ``x > 2``: the ``z -> 1/z`` connection formula, which for this parameter
  family closes on itself::

      C_beta(x) = beta/(beta-1) * C_{1-beta}(1/x)/x + pi*beta/sin(pi*beta) * x**-beta

  Integer ``beta`` (where both coefficients have poles) uses the elementary
  antiderivative instead, and ``beta`` within ``_NEAR_INT`` of an integer is
  interpolated in ``beta`` to sidestep the cancellation between the two terms.

The Q-function, E1 and the lower incomplete gamma function are thin wrappers
over :mod:`scipy.special` with input validation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

__all__ = [
    "SpecFunConstants",
    "CONSTANTS",
    "c_beta",
    "c_beta_minus_one",
    "q_function",
    "log_q_function",
    "exp_integral_e1",
    "lower_incomplete_gamma",
]


@dataclass(frozen=True)
class SpecFunConstants:
    euler_mascheroni: float = 0.57721566490153286061


CONSTANTS = SpecFunConstants()

_SERIES_MAX = 0.5
_PFAFF_MAX = 2.0
_PFAFF_BETA = 20.0
_NEAR_INT = 2e-5
_MAX_TERMS = 400
_EPS = 1e-17


def _check_beta(beta: float) -> None:
    if math.isnan(beta) or beta == -math.inf:
        raise ValueError(f"beta must be a real number or +inf, got {beta}")
    if beta == math.inf:
        return
    if beta <= -1.0 or beta == 0.0:
        raise ValueError(f"beta must lie in (-1, 0) or (0, inf], got {beta}")


def _power_series(beta: float, x: np.ndarray, start: int = 0) -> np.ndarray:
    # sum_{n>=start} beta/(beta+n) (-x)^n, |x| <= 0.5
    power = -x if start else np.ones_like(x)
    total = beta / (beta + 1.0) * power if start else np.ones_like(x)
    for n in range(start + 1, _MAX_TERMS):
        power = power * -x
        term = beta / (beta + n) * power
        total = total + term
        if np.all(np.abs(term) <= _EPS * np.abs(total)):
            break
    return total


def _pfaff_series(beta: float, x: np.ndarray) -> np.ndarray:
    # F(1, 1; 1+beta; w) = sum_n n!/(1+beta)_n w^n
    w = x / (1.0 + x)
    total = np.ones_like(x)
    term = np.ones_like(x)
    for n in range(_MAX_TERMS * 4):
        term = term * w * (n + 1.0) / (n + 1.0 + beta)
        total = total + term
        if np.all(term <= _EPS * total):
            break
    return total / (1.0 + x)


def _integer_large(m: int, x: np.ndarray) -> np.ndarray:
    # m x^-m int_0^x v^(m-1)/(1+v) dv, expanded by polynomial division
    if m == 1:
        return np.log1p(x) / x
    acc = np.zeros_like(x)
    for k in range(m - 1):
        p = m - 1 - k
        acc = acc + (-1.0) ** k * x**p / p
    acc = acc + (-1.0) ** (m - 1) * np.log1p(x)
    return m * acc / x**m


def _sinpi(beta: float) -> float:
    # reduce first: pi*beta rounding costs digits when beta is near an integer
    m = round(beta)
    return (-1.0) ** (m % 2) * math.sin(math.pi * (beta - m))


def _reflection_large(beta: float, x: np.ndarray) -> np.ndarray:
    inv = 1.0 / x
    head = beta / (beta - 1.0) * _power_series(1.0 - beta, inv) * inv
    tail = math.pi * beta / _sinpi(beta) * x ** (-beta)
    return head + tail


def _large_argument(beta: float, x: np.ndarray) -> np.ndarray:
    m = round(beta)
    if m >= 1 and beta == m:
        return _integer_large(int(m), x)
    if m >= 1 and abs(beta - m) < _NEAR_INT:
        # quartic interpolation in beta through m, m +- h, m +- 2h
        h = 2.5 * _NEAR_INT
        nodes = [m - 2 * h, m - h, float(m), m + h, m + 2 * h]
        values = [_integer_large(int(m), x) if b == m else _reflection_large(b, x) for b in nodes]
        out = np.zeros_like(x)
        for i, bi in enumerate(nodes):
            weight = 1.0
            for j, bj in enumerate(nodes):
                if j != i:
                    weight *= (beta - bj) / (bi - bj)
            out = out + weight * values[i]
        return out
    return _reflection_large(beta, x)


def c_beta(beta: float, x):
    """Evaluate ``C_beta(x) = 2F1(1, beta; 1 + beta; -x)`` for ``x >= 0``.

    ``beta`` must lie in ``(-1, 0)``, ``(0, inf)`` or be ``+inf``; the latter
    returns ``1/(1+x)``, which is the limit used for a zero path loss
    exponent.  ``x`` may be a scalar or an array; the return type follows it.
    """
    beta = float(beta)
    _check_beta(beta)
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ValueError("c_beta requires finite x >= 0")
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)

    if beta == math.inf:
        out = 1.0 / (1.0 + arr)
    else:
        out = np.empty_like(arr)
        small = arr <= _SERIES_MAX
        # for large beta the Pfaff terms shrink like n!/beta**n at any x
        pfaff_max = math.inf if beta >= _PFAFF_BETA else _PFAFF_MAX
        mid = (arr > _SERIES_MAX) & (arr <= pfaff_max)
        large = arr > pfaff_max
        if small.any():
            out[small] = _power_series(beta, arr[small])
        if mid.any():
            out[mid] = _pfaff_series(beta, arr[mid])
        if large.any():
            out[large] = _large_argument(beta, arr[large])
    return float(out[0]) if scalar else out


def c_beta_minus_one(beta: float, x):
    """``C_beta(x) - 1`` without cancellation for small ``x``.

    The interference integrals multiply this difference by ``lambda pi R**2``,
    which can be huge, so its relative accuracy matters near ``x = 0``.
    """
    beta = float(beta)
    _check_beta(beta)
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ValueError("c_beta_minus_one requires finite x >= 0")
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if beta == math.inf:
        out = -arr / (1.0 + arr)
    else:
        out = c_beta(beta, arr) - 1.0
        small = arr <= _SERIES_MAX
        if small.any():
            out[small] = _power_series(beta, arr[small], start=1)
    return float(out[0]) if scalar else out


def _check_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value}")
    return value


def q_function(x: float) -> float:
    """Gaussian tail probability ``P(N(0,1) > x)``."""
    x = _check_finite("x", x)
    return 0.5 * float(special.erfc(x / math.sqrt(2.0)))


def log_q_function(x: float) -> float:
    """``log Q(x)``, finite far into the upper tail where ``Q`` underflows."""
    x = _check_finite("x", x)
    z = x / math.sqrt(2.0)
    if z < 1.0:
        return math.log(0.5 * float(special.erfc(z)))
    return math.log(0.5 * float(special.erfcx(z))) - z * z


def exp_integral_e1(x: float) -> float:
    """``int_x^inf exp(-t)/t dt`` for ``x > 0`` (conventionally written E1)."""
    x = _check_finite("x", x)
    if x <= 0:
        raise ValueError(f"exp_integral_e1 requires x > 0, got {x}")
    return float(special.exp1(x))


def lower_incomplete_gamma(s: float, z: float) -> float:
    """Unregularised lower incomplete gamma ``int_0^z t^(s-1) exp(-t) dt``."""
    s = _check_finite("s", s)
    if s <= 0:
        raise ValueError(f"lower_incomplete_gamma requires s > 0, got {s}")
    if math.isnan(z) or z < 0:
        raise ValueError(f"lower_incomplete_gamma requires z >= 0, got {z}")
    if z == math.inf:
        return math.gamma(s)
    return float(special.gammainc(s, z) * special.gamma(s))
