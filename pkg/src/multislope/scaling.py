"""Density sweeps of coverage, coverage density and potential throughput.

The tail exponent of the potential throughput ``tau(lambda)`` is fitted by
least squares on ``(log lambda, log tau)`` over the densest part of the grid.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analytic import DomainError, NetworkScenario, coverage, coverage_snr
from .pathloss import PathLossModel, make_dual

__all__ = [
    "FitError",
    "DensitySweep",
    "PhaseRow",
    "sweep_density",
    "fit_tail_exponent",
    "phase_transition_report",
    "DEFAULT_FIT_FRACTION",
    "SLOPE_TOL",
]

DEFAULT_FIT_FRACTION = 0.4
SLOPE_TOL = 0.05


class FitError(ValueError):
    """The tail fit is undefined (e.g. zero throughput inside the fit window)."""


@dataclass(frozen=True)
class DensitySweep:
    densities: np.ndarray
    coverage_sir: np.ndarray
    coverage_snr: np.ndarray
    coverage: np.ndarray
    mu: np.ndarray
    tau: np.ndarray
    threshold: float
    fit_window: tuple[int, int]
    fitted_exponent: float
    fit_residual: float

    @property
    def rows(self):
        """``(lambda, coverage, mu, tau)`` per grid point."""
        return list(zip(self.densities.tolist(), self.coverage.tolist(),
                        self.mu.tolist(), self.tau.tolist()))

    @property
    def fit_range(self) -> tuple[float, float]:
        lo, hi = self.fit_window
        return float(self.densities[lo]), float(self.densities[hi - 1])


def _check_grid(grid: np.ndarray) -> None:
    if grid.ndim != 1 or grid.size < 8:
        raise ValueError("a density sweep needs at least 8 grid points")
    if np.any(grid <= 0) or not np.all(np.isfinite(grid)):
        raise ValueError("densities must be finite and > 0")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("densities must be strictly increasing")
    if math.log10(grid[-1] / grid[0]) < 3 - 1e-9:
        raise ValueError("the density grid must span at least 3 decades")


def _fit_window(grid: np.ndarray, fit_range, fit_fraction: float) -> tuple[int, int]:
    if fit_range is None:
        start = int(math.floor(len(grid) * (1.0 - fit_fraction)))
        return min(start, len(grid) - 2), len(grid)
    lo, hi = fit_range
    inside = np.flatnonzero((grid >= lo * (1 - 1e-12)) & (grid <= hi * (1 + 1e-12)))
    if inside.size < 2:
        raise FitError(f"fewer than two grid points in the fit range [{lo:g}, {hi:g}]")
    return int(inside[0]), int(inside[-1]) + 1


def fit_tail_exponent(densities, tau, window: tuple[int, int]) -> tuple[float, float]:
    """Slope and RMS residual of ``log tau`` against ``log lambda`` on ``window``."""
    lo, hi = window
    lam = np.asarray(densities, dtype=float)[lo:hi]
    t = np.asarray(tau, dtype=float)[lo:hi]
    if np.any(t <= 0):
        raise FitError("potential throughput is zero inside the fit window")
    x, y = np.log(lam), np.log(t)
    design = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    return float(coef[0]), float(np.sqrt(np.mean(resid**2)))


def sweep_density(pathloss: PathLossModel, threshold: float, noise: float, lambda_grid, *,
                  fit_range=None, fit_fraction: float = DEFAULT_FIT_FRACTION,
                  threads: int = 1) -> DensitySweep:
    """Analytic coverage, coverage density and potential throughput over ``lambda_grid``.

    The fit window is the top ``fit_fraction`` of the grid unless ``fit_range``
    gives an explicit ``(lambda_lo, lambda_hi)``.
    """
    grid = np.asarray(lambda_grid, dtype=float)
    _check_grid(grid)
    window = _fit_window(grid, fit_range, fit_fraction)

    def row(lam):
        sc = NetworkScenario(float(lam), noise, pathloss)
        sir = coverage(sc.with_noise(0.0), threshold).value
        snr = coverage_snr(sc, threshold).value
        sinr = sir if noise == 0 else coverage(sc, threshold).value
        return sir, snr, sinr

    if pathloss.alpha_last <= 2:
        raise DomainError("alpha_last <= 2: interference diverges and coverage is 0", 0.0)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(row, grid))
    else:
        rows = [row(lam) for lam in grid]
    sir, snr, sinr = (np.array(col) for col in zip(*rows))
    mu = grid * sinr
    tau = math.log2(1.0 + threshold) * mu
    slope, resid = fit_tail_exponent(grid, tau, window)
    return DensitySweep(grid, sir, snr, sinr, mu, tau, float(threshold), window, slope, resid)


@dataclass(frozen=True)
class PhaseRow:
    alpha0: float
    exponent: float
    residual: float
    tag: str
    sweep: DensitySweep


def _tag(slope: float, tol: float) -> str:
    if slope > tol:
        return "diverging"
    if slope < -tol:
        return "vanishing"
    return "bounded"


def phase_transition_report(alpha0_list, alpha1: float, r_c: float, threshold: float, *,
                            lambda_grid=None, fit_range=(1e3, 1e5), noise: float = 0.0,
                            slope_tol: float = SLOPE_TOL) -> list[PhaseRow]:
    """One interference-limited sweep per near-field exponent, tagged by tail slope.

    ``diverging`` when the slope exceeds ``slope_tol``, ``vanishing`` below
    ``-slope_tol`` and ``bounded`` in between.
    """
    grid = np.logspace(-2, 5, 29) if lambda_grid is None else np.asarray(lambda_grid, dtype=float)
    out = []
    for a0 in alpha0_list:
        model = make_dual(a0, alpha1, r_c)
        sweep = sweep_density(model, threshold, noise, grid, fit_range=fit_range)
        out.append(PhaseRow(float(a0), sweep.fitted_exponent, sweep.fit_residual,
                            _tag(sweep.fitted_exponent, slope_tol), sweep))
    return out
