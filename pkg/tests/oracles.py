"""Reference values computed independently of the package (mpmath / scipy quadrature)."""

import math

import mpmath as mp
from scipy import integrate

mp.mp.dps = 30


def c_beta_quad(beta, x):
    """beta * int_0^1 u^(beta-1)/(1+xu) du, valid for beta > 0.

    Taken as int_0^1 dv/(1 + x v^(1/beta)) (u = v^(1/beta)) to remove the endpoint singularity.
    """
    f = lambda v: 1 / (1 + x * v ** (1 / mp.mpf(beta)))
    return float(mp.quad(f, [0, 0.25, 0.5, 0.75, 1]))


def c_beta_mp(beta, x):
    return float(mp.hyp2f1(1, beta, 1 + beta, -mp.mpf(x)))


def c_beta_negative_identity(beta, t):
    """1 + int_1^inf T/(T + s^(-1/beta)) ds for beta in (-1, 0)."""
    val, _ = integrate.quad(lambda s: t / (t + s ** (-1.0 / beta)), 1.0, math.inf,
                            epsabs=1e-12, epsrel=1e-12, limit=500)
    return 1.0 + val


CLOSED_FORMS = {
    1.0: lambda x: math.log1p(x) / x,
    0.5: lambda x: math.atan(math.sqrt(x)) / math.sqrt(x),
    -0.5: lambda x: 1.0 + math.sqrt(x) * math.atan(math.sqrt(x)),
    2.0: lambda x: 2.0 * (x - math.log1p(x)) / x**2,
    math.inf: lambda x: 1.0 / (1.0 + x),
}


def q_quad(x):
    pts = [x, x + 0.25, x + 1, x + 4, mp.inf] if x > 0 else [x, 0, 1, 4, mp.inf]
    return float(mp.quad(lambda t: mp.exp(-t * t / 2), pts) / mp.sqrt(2 * mp.pi))


def e1_series(x):
    """-gamma - log x + sum (-1)^(n+1) x^n/(n n!)."""
    x = mp.mpf(x)
    total = -mp.euler - mp.log(x)
    n, term = 1, mp.mpf(1)
    while True:
        term = term * x / n
        add = (-1) ** (n + 1) * term / n
        total += add
        if abs(add) < mp.mpf(10) ** -28 * abs(total):
            return float(total)
        n += 1


def lower_gamma_quad(s, z):
    return float(mp.quad(lambda t: t ** (s - 1) * mp.exp(-t), [0, z]))


def standard_sir(alpha, t):
    """1/C_{-2/alpha}(T) from the defining integral (no hypergeometric code)."""
    return 1.0 / c_beta_negative_identity(-2.0 / alpha, t)


def log_q_quad(x):
    """log Q(x) for x > 0 from exp(-x^2/2) int_0^inf exp(-s x - s^2/2) ds."""
    inner = mp.quad(lambda s: mp.exp(-s * x - s * s / 2), [0, 1 / mp.mpf(x), 1, mp.inf])
    return float(-mp.mpf(x) ** 2 / 2 + mp.log(inner / mp.sqrt(2 * mp.pi)))
