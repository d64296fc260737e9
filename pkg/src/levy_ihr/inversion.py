"""Gaver-Stehfest inversion of Laplace-Carson transforms."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import DomainError, PrecisionError

log = logging.getLogger(__name__)

MAX_ORDER = 9
DEFAULT_ORDER = 8
CLAMP_TOL = 1e-4


@dataclass(frozen=True)
class GaverStehfestTable:
    N: int
    coef: np.ndarray  # length 2N, k = 1..2N

    def abscissae(self, t: float) -> np.ndarray:
        """Transform arguments ``k ln2 / t``."""
        return np.arange(1, 2 * self.N + 1) * math.log(2.0) / t


@lru_cache(maxsize=None)
def _zeta_exact(N: int) -> tuple:
    out = []
    for k in range(1, 2 * N + 1):
        acc = Fraction(0)
        for j in range((k + 1) // 2, min(k, N) + 1):
            acc += Fraction(j ** (N + 1), math.factorial(N)) * math.comb(N, j) \
                * math.comb(2 * j, j) * math.comb(j, k - j)
        out.append((-1) ** (N + k) * acc / k)
    return tuple(out)


def gs_coefficients(N: int = DEFAULT_ORDER) -> GaverStehfestTable:
    """Coefficients ``zeta_{k,N}``, k = 1..2N, from exact rational arithmetic."""
    if not isinstance(N, (int, np.integer)) or N < 1:
        raise DomainError(f"order must be an integer >= 1, got {N!r}")
    if N > MAX_ORDER:
        raise PrecisionError(f"order {N} exceeds double-precision budget ({MAX_ORDER})")
    return GaverStehfestTable(int(N), np.array([float(z) for z in _zeta_exact(int(N))]))


def invert_at(gs: GaverStehfestTable, transform: Callable[[float], float], t: float) -> float:
    """``sum_k zeta_k * transform(k ln2 / t)`` summed in ascending k."""
    if not t > 0:
        raise DomainError("t must be positive")
    total = 0.0
    for z, th in zip(gs.coef, gs.abscissae(t)):
        total += z * transform(th)
    return total


def clamp_probability(p, tol: float = CLAMP_TOL):
    """Clamp to [0, 1]; violations beyond ``tol`` raise."""
    arr = np.asarray(p, dtype=float)
    viol = np.maximum(-arr, arr - 1.0)
    worst = float(np.max(viol)) if arr.size else 0.0
    if worst > tol:
        raise DomainError(f"inverted probability out of [0,1] by {worst:.3g}")
    if worst > 0:
        log.warning("clamping inverted probability (violation %.3g)", worst)
    out = np.clip(arr, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out
