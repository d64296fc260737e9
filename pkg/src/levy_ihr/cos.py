"""Fourier-cosine (COS) expansion of the density of ``X_t``.

On a truncation interval ``[a, b]`` the density is expanded as
``f(x) = sum' F_k cos(k pi (x - a) / (b - a))`` with coefficients taken from
the characteristic function. The CDF and the partial moments needed for
expected shortfall are integrated term by term in closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, RangeError
from .models import ModelSpec, char_function, cumulants

DEFAULT_L = 10.0
DEFAULT_K = 512
DENSITY_FLOOR = 1e-300
TRIM_TOL = 1e-15


def cos_range(model: ModelSpec, t: float, L: float = DEFAULT_L) -> tuple[float, float]:
    """Cumulant-based interval ``c1 +- L sqrt(c2 + sqrt(c4))`` for ``X_t``."""
    c1, c2, c4 = cumulants(model)
    half = L * math.sqrt(c2 * t + math.sqrt(c4 * t))
    if not half > 0:
        raise DomainError("degenerate distribution: zero variance")
    return c1 * t - half, c1 * t + half


@dataclass(frozen=True)
class CosExpansion:
    a: float
    b: float
    coef: np.ndarray  # F_k with the k=0 term already halved

    @property
    def omega(self) -> np.ndarray:
        return np.arange(self.coef.size) * math.pi / (self.b - self.a)

    def _check(self, x: np.ndarray):
        if np.any(x < self.a) or np.any(x > self.b):
            raise RangeError(f"x outside truncation range [{self.a:.6g}, {self.b:.6g}]")

    def pdf(self, x, check: bool = True):
        x = np.asarray(x, dtype=float)
        if check:
            self._check(x)
        # Clenshaw recurrence for sum_k F_k cos(k theta)
        theta = (x - self.a) * (math.pi / (self.b - self.a))
        c = np.cos(theta)
        c2 = 2.0 * c
        b1 = np.zeros_like(theta)
        b2 = np.zeros_like(theta)
        for f in self.coef[:0:-1]:
            b1, b2 = f + c2 * b1 - b2, b1
        return self.coef[0] + c * b1 - b2

    def cdf(self, x):
        """``int_a^x f``; 0 below ``a`` and 1 above ``b``."""
        x = np.clip(np.asarray(x, dtype=float), self.a, self.b)
        D = x - self.a
        w = self.omega[1:]
        terms = np.sin(np.multiply.outer(D, w)) / w
        return self.coef[0] * D + terms @ self.coef[1:]

    def partial_mean(self, x):
        """``int_a^x y f(y) dy``."""
        x = np.clip(np.asarray(x, dtype=float), self.a, self.b)
        D = x - self.a
        w = self.omega[1:]
        wD = np.multiply.outer(D, w)
        s = np.sin(wD) / w
        c = (np.cos(wD) - 1.0) / w ** 2
        Dx = np.asarray(D)[..., None]
        terms = self.a * s + Dx * s + c
        return self.coef[0] * (self.a * D + 0.5 * D * D) + terms @ self.coef[1:]

    def partial_exp(self, x):
        """``int_a^x exp(y) f(y) dy``."""
        x = np.clip(np.asarray(x, dtype=float), self.a, self.b)
        D = x - self.a
        w = self.omega
        wD = np.multiply.outer(D, w)
        eD = np.exp(np.asarray(D))[..., None]
        terms = (eD * (np.cos(wD) + w * np.sin(wD)) - 1.0) / (1.0 + w * w)
        return math.exp(self.a) * (terms @ self.coef)

    def quantile(self, alpha: float) -> float:
        f = lambda x: float(self.cdf(x)) - alpha
        if f(self.a) >= 0 or f(self.b) <= 0:
            raise RangeError("quantile outside truncation range; widen L")
        return brentq(f, self.a, self.b, xtol=1e-13, rtol=4 * np.finfo(float).eps)


def cos_expansion(model: ModelSpec, t: float, L: float = DEFAULT_L, K: int = DEFAULT_K,
                  a: float | None = None, b: float | None = None,
                  trim_tol: float = TRIM_TOL) -> CosExpansion:
    """COS coefficients of ``X_t``.

    Terms beyond the last frequency where ``|phi| >= trim_tol`` are dropped;
    each dropped term is bounded by ``2 trim_tol / (b - a)``.
    """
    if not t > 0:
        raise DomainError("t must be positive")
    if a is None or b is None:
        a0, b0 = cos_range(model, t, L)
        a = a0 if a is None else a
        b = b0 if b is None else b
    k = np.arange(K)
    u = k * math.pi / (b - a)
    phi = char_function(model, u, t)
    if trim_tol > 0:
        keep = np.nonzero(np.abs(phi) >= trim_tol)[0]
        n_keep = int(keep[-1]) + 1 if keep.size else 1
        u, phi = u[:n_keep], phi[:n_keep]
    coef = 2.0 / (b - a) * np.real(phi * np.exp(-1j * u * a))
    coef[0] *= 0.5
    return CosExpansion(a, b, coef)


def cos_density(model: ModelSpec, dt: float, x_points, L: float = DEFAULT_L,
                K: int = DEFAULT_K, floor: float = DENSITY_FLOOR):
    """Density of ``X_dt`` at ``x_points``, floored at ``floor``."""
    exp = cos_expansion(model, dt, L, K)
    return np.maximum(exp.pdf(x_points), floor)
