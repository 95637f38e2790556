"""Piecewise power-law path loss models.

A model with exponents ``a_0 .. a_{N-1}`` and breakpoints ``R_1 < .. < R_{N-1}``
has gain ``K_n d**-a_n`` on ``[R_n, R_{n+1})`` with ``R_0 = 0``, ``R_N = inf``
and ``K_n = prod_{i<=n} R_i**(a_i - a_{i-1})``, so the gain is continuous.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PathLossModel",
    "make_standard",
    "make_dual",
    "make_multislope",
    "evaluate",
]


def _continuity_constants(exponents, breakpoints) -> tuple[float, ...]:
    # accumulate in log space; K_n spans many decades for large breakpoints
    log_k = [0.0]
    for i, r in enumerate(breakpoints, start=1):
        log_k.append(log_k[-1] + (exponents[i] - exponents[i - 1]) * math.log(r))
    return tuple(math.exp(v) for v in log_k)


@dataclass(frozen=True)
class PathLossModel:
    exponents: tuple[float, ...]
    breakpoints: tuple[float, ...] = ()
    constants: tuple[float, ...] = field(init=False)
    ordered: bool = field(init=False)

    def __post_init__(self):
        exps = tuple(float(a) for a in self.exponents)
        bps = tuple(float(r) for r in self.breakpoints)
        if not exps:
            raise ValueError("at least one path loss exponent is required")
        if len(exps) != len(bps) + 1:
            raise ValueError(
                f"need len(exponents) == len(breakpoints) + 1, got {len(exps)} and {len(bps)}"
            )
        if not all(math.isfinite(a) for a in exps + bps):
            raise ValueError("exponents and breakpoints must be finite")
        if any(a < 0 for a in exps):
            raise ValueError(f"path loss exponents must be >= 0, got {exps}")
        if any(r <= 0 for r in bps):
            raise ValueError(f"breakpoints must be positive, got {bps}")
        if any(b <= a for a, b in zip(bps, bps[1:])):
            raise ValueError(f"breakpoints must be strictly increasing, got {bps}")
        object.__setattr__(self, "exponents", exps)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "constants", _continuity_constants(exps, bps))
        object.__setattr__(self, "ordered", all(b >= a for a, b in zip(exps, exps[1:])))

    @property
    def n_slopes(self) -> int:
        return len(self.exponents)

    @property
    def deltas(self) -> tuple[float, ...]:
        """``2/alpha`` per segment, ``inf`` for a zero exponent."""
        return tuple(math.inf if a == 0 else 2.0 / a for a in self.exponents)

    @property
    def alpha_last(self) -> float:
        return self.exponents[-1]

    @property
    def eta(self) -> float:
        """Continuity constant of the outermost segment (``R_c**(a1-a0)`` for dual slope)."""
        return self.constants[-1]

    def segment(self, distance: float) -> int:
        # a distance equal to a breakpoint belongs to the segment it starts
        return bisect.bisect_right(self.breakpoints, distance)

    def __call__(self, distance):
        return evaluate(self, distance)

    def to_dict(self) -> dict:
        return {"exponents": list(self.exponents), "breakpoints": list(self.breakpoints)}

    @classmethod
    def from_dict(cls, data: dict) -> "PathLossModel":
        unknown = set(data) - {"exponents", "breakpoints"}
        if unknown:
            raise ValueError(f"unknown path loss keys: {sorted(unknown)}")
        return make_multislope(data["exponents"], data.get("breakpoints", []))


def make_standard(alpha: float) -> PathLossModel:
    """Single-slope model ``d**-alpha``."""
    return PathLossModel((alpha,))


def make_dual(alpha0: float, alpha1: float, r_c: float, *, allow_unordered: bool = False) -> PathLossModel:
    """Dual-slope model: ``d**-alpha0`` up to ``r_c``, ``eta * d**-alpha1`` beyond.

    ``alpha0 > alpha1`` is refused unless ``allow_unordered`` is set, in which
    case the model is only suitable for the analytic formulas.
    """
    if alpha0 > alpha1 and not allow_unordered:
        raise ValueError(f"dual-slope model needs alpha0 <= alpha1, got {alpha0} > {alpha1}")
    return PathLossModel((alpha0, alpha1), (r_c,))


def make_multislope(exponents, breakpoints) -> PathLossModel:
    return PathLossModel(tuple(exponents), tuple(breakpoints))


def evaluate(model: PathLossModel, distance):
    """Path loss gain at ``distance`` (scalar or array), all entries ``> 0``."""
    d = np.asarray(distance, dtype=float)
    if np.any(~(d > 0)) or not np.all(np.isfinite(d)):
        raise ValueError("path loss is only defined for finite distances > 0")
    if d.ndim == 0:
        n = model.segment(float(d))
        return model.constants[n] * float(d) ** -model.exponents[n]
    seg = np.searchsorted(np.asarray(model.breakpoints), d, side="right")
    k = np.asarray(model.constants)[seg]
    a = np.asarray(model.exponents)[seg]
    return k * d**-a
