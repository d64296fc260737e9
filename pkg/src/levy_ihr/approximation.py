"""Hyper-exponential approximation of completely monotone Lévy densities.

A completely monotone jump density is a mixture of exponentials,
``pi(y) = int exp(-u y) mu(du)`` for ``y > 0`` (mirrored for ``y < 0``).
Discretizing the mixing measure ``mu`` on a partition of the rate axis and
placing each cell's mass at its midpoint rate yields a hyper-exponential
jump density. The diffusion coefficient is kept (zero for VG/CGMY) and the
drift is reset so that the Laplace exponents agree at ``theta = 1``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import integrate
from scipy.special import gamma as gamma_fn

from .errors import DomainError, UnsupportedModel
from .hejd import Direction
from .models import CGMY, VG, HyperExpSpec, ModelSpec, jump_density, laplace_exponent


@dataclass(frozen=True)
class BernsteinMeasure:
    """Mixing density of the exponential rates for one side of the jump density.

    ``density(u) = C (u - support_low)^Y / Gamma(1 + Y)`` on ``(support_low, inf)``.
    """

    side: Direction
    C: float
    support_low: float
    Y: float = 0.0

    def density(self, u):
        u = np.asarray(u, dtype=float)
        s = np.clip(u - self.support_low, 0.0, None)
        return np.where(u > self.support_low, self.C * s ** self.Y / gamma_fn(1 + self.Y), 0.0)

    def mass(self, a, b):
        """Closed-form ``mu([a, b))`` for ``support_low <= a <= b``."""
        a = np.asarray(a, dtype=float) - self.support_low
        b = np.asarray(b, dtype=float) - self.support_low
        if self.Y == 0:
            return self.C * (b - a)
        k = self.C / gamma_fn(1 + self.Y) / (1 + self.Y)
        return k * (b ** (1 + self.Y) - a ** (1 + self.Y))

    def jump_density(self, y):
        """``int exp(-u y) mu(du)`` in closed form (``y > 0``)."""
        y = np.asarray(y, dtype=float)
        return self.C * np.exp(-self.support_low * y) / y ** (1 + self.Y)

    def reconstruct(self, y: float) -> float:
        """Numerical quadrature of ``int exp(-u y) mu(du)``; independent of ``jump_density``."""
        L = self.support_low
        f = lambda s: math.exp(-(L + s) * y) * self.C * s ** self.Y / gamma_fn(1 + self.Y)
        val, _ = integrate.quad(f, 0.0, np.inf, epsabs=0.0, epsrel=1e-12, limit=200)
        return val

    def tail_second_moment(self, u_max: float) -> float:
        """Second moment of jumps generated by rates above ``u_max``: ``int 2/u^3 mu(du)``."""
        if self.Y == 0:
            return self.C / u_max ** 2
        # substitute u = u_max / s to integrate over (0, 1]
        f = lambda s: 2.0 * s / u_max ** 2 * float(self.density(u_max / s))
        val, _ = integrate.quad(f, 0.0, 1.0, epsrel=1e-10, limit=200)
        return val

    def mass_beyond_one(self, lo: float, hi: float = np.inf) -> float:
        """Jump mass at sizes > 1 generated by rates in ``[lo, hi)``."""
        f = lambda u: math.exp(-u) / u * float(self.density(u))
        val, _ = integrate.quad(f, lo, hi, epsrel=1e-10, limit=200)
        return val


def bernstein_measure(model: ModelSpec, side) -> BernsteinMeasure:
    side = Direction(side)
    if isinstance(model, VG):
        Y = 0.0
    elif isinstance(model, CGMY):
        Y = model.Y
    else:
        raise UnsupportedModel(f"{type(model).__name__} has no Bernstein approximation")
    low = model.M if side is Direction.UP else model.G
    return BernsteinMeasure(side, model.C, low, Y)


@dataclass(frozen=True)
class ApproxConfig:
    # bounds on the three approximation error surrogates
    tail_tol: float = 1e-6
    l2_tol: float = 1e-2
    small_jump_tol: float = 1e-6
    delta0: float = 1e-8
    u_max: float | None = None


@dataclass(frozen=True)
class ApproximationReport:
    n_up: int
    n_down: int
    eps: dict
    lambda_n: float
    drift_matched: float
    u_max_up: float
    u_max_down: float
    drift_residual: float = 0.0
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def choose_u_max(measure: BernsteinMeasure, tol: float) -> float:
    """Smallest rate cutoff whose dropped small-jump second moment is below ``tol``."""
    if measure.Y == 0:
        return max(math.sqrt(measure.C / tol), 2.0 * measure.support_low)
    # upper bound (u - L)^Y <= u^Y gives an explicit cutoff
    k = 2.0 * measure.C / (gamma_fn(1 + measure.Y) * (2.0 - measure.Y))
    return max((k / tol) ** (1.0 / (2.0 - measure.Y)), 2.0 * measure.support_low)


def discretize(measure: BernsteinMeasure, n_terms: int, u_max: float,
               delta0: float = 1e-8, tail_tol: float = 1e-6):
    """Midpoint discretization of ``measure`` on a geometric grid.

    Returns ``(rates, lam_weights, lam_total)`` where ``lam_weights[i]`` is
    the cell mass divided by its midpoint rate (the jump intensity carried by
    that exponential) and ``lam_total`` their sum.
    """
    if n_terms < 1:
        raise DomainError("n_terms must be >= 1")
    lo = measure.support_low + delta0
    if not u_max > lo:
        raise DomainError("u_max must exceed the support lower bound")
    missed = measure.mass_beyond_one(u_max)
    total = measure.mass_beyond_one(measure.support_low)
    if total > 0 and missed > tail_tol * total:
        raise DomainError(f"u_max={u_max} misses {missed / total:.3g} of the jump mass beyond size 1")
    edges = np.geomspace(lo, u_max, n_terms + 1)
    return _cells(measure, edges)


def _cells(measure: BernsteinMeasure, edges: np.ndarray):
    rates = 0.5 * (edges[:-1] + edges[1:])
    lam_w = measure.mass(edges[:-1], edges[1:]) / rates
    return rates, lam_w, float(lam_w.sum())


def _l2_error(model: ModelSpec, spec: HyperExpSpec, lo: float, hi: float, n: int = 400) -> float:
    y = np.geomspace(lo, hi, n)
    err = 0.0
    for s in (1.0, -1.0):
        d = (jump_density(model, s * y) - jump_density(spec, s * y)) ** 2
        err += float(integrate.trapezoid(d, y))
    return err


def approximate(model: ModelSpec, n_up: int = 100, n_down: int = 100,
                config: ApproxConfig | None = None) -> tuple[HyperExpSpec, ApproximationReport]:
    """Hyper-exponential jump process approximating a VG/CGMY model."""
    cfg = config or ApproxConfig()
    if n_up < 1 or n_down < 1:
        raise DomainError("n_up and n_down must be >= 1")
    if model.M <= 1:
        raise DomainError("drift matching at theta=1 requires M > 1")
    parts = {}
    for side, n_terms in ((Direction.UP, n_up), (Direction.DOWN, n_down)):
        meas = bernstein_measure(model, side)
        # split the small-jump budget evenly between the two sides
        u_max = cfg.u_max or choose_u_max(meas, 0.5 * cfg.small_jump_tol)
        rates, lam_w, lam = discretize(meas, n_terms, u_max, cfg.delta0, cfg.tail_tol)
        parts[side] = (meas, u_max, rates, lam_w, lam)
    up, dn = parts[Direction.UP], parts[Direction.DOWN]
    lam_n = up[4] + dn[4]
    w_up, w_dn = up[3] / lam_n, dn[3] / lam_n
    scale = w_up.sum() + w_dn.sum()
    w_up, w_dn = w_up / scale, w_dn / scale
    jump_n_at_one = lam_n * (np.sum(w_up / (up[2] - 1.0)) - np.sum(w_dn / (dn[2] + 1.0)))
    target = laplace_exponent(model, 1.0)
    b_n = float(target - jump_n_at_one)
    spec = HyperExpSpec(b_n, 0.0, lam_n, w_up, up[2], w_dn, dn[2])
    resid = abs(laplace_exponent(spec, 1.0) - target)
    eps = {
        "truncation_mass": max(up[0].mass_beyond_one(up[1]), dn[0].mass_beyond_one(dn[1])),
        "l2_density": _l2_error(model, spec, 1.0 / max(up[1], dn[1]) * 10, 1.0),
        "small_jump_moment": up[0].tail_second_moment(up[1]) + dn[0].tail_second_moment(dn[1]),
    }
    report = ApproximationReport(n_up, n_down, eps, lam_n, b_n, up[1], dn[1], resid)
    return spec, report
