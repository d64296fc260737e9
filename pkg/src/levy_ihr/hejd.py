"""Maturity-randomized first-passage probabilities for hyper-exponential jump-diffusions.

For ``level > 0`` the equation ``Phi(theta) = level`` has real
roots interlacing the poles of the Laplace exponent. The Laplace-Carson
transform of the first-passage probability (equivalently the passage
probability before an independent Exp(level) horizon) is an exponential
sum over those roots. Its weights split the passage event by mode:
continuous crossing (diffusion or creeping drift) and overshoot by each
exponential jump type.

Weights are computed from a partial-fraction closed form evaluated in log
space; the equivalent linear system is available as ``method="linear"``.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ConvergenceError, DomainError, SingularityError
from .models import Diffusion, HyperExpSpec, as_hyperexp

log = logging.getLogger(__name__)


class Direction(str, enum.Enum):
    UP = "up"
    DOWN = "down"


class Regime(str, enum.Enum):
    SIGMA_POS = "SigmaPos"
    SIGMA_ZERO_MU_POS = "SigmaZeroMuPos"
    SIGMA_ZERO_MU_NEG = "SigmaZeroMuNeg"
    SIGMA_ZERO_MU_ZERO = "SigmaZeroMuZero"


def regime_of(spec: HyperExpSpec) -> Regime:
    if spec.sigma > 0:
        return Regime.SIGMA_POS
    if spec.mu > 0:
        return Regime.SIGMA_ZERO_MU_POS
    if spec.mu < 0:
        return Regime.SIGMA_ZERO_MU_NEG
    return Regime.SIGMA_ZERO_MU_ZERO


@dataclass(frozen=True)
class RootSet:
    """Real roots of ``Phi(theta) = level``.

    ``up_roots`` ascending positive, ``down_roots`` descending negative
    (``down_roots[0]`` is closest to zero).
    """

    level: float
    up_roots: np.ndarray
    down_roots: np.ndarray
    regime: Regime


# ---------------------------------------------------------------------------
# Laplace exponent in real arithmetic (hot path)

def _phi(spec: HyperExpSpec, th: np.ndarray) -> np.ndarray:
    out = spec.mu * th + 0.5 * spec.sigma ** 2 * th * th
    if spec.lam > 0:
        t = th[..., None]
        s = 0.0
        if spec.m:
            s = s + np.sum(spec.w_up * spec.r_up / (spec.r_up - t), axis=-1)
        if spec.n:
            s = s + np.sum(spec.w_down * spec.r_down / (spec.r_down + t), axis=-1)
        out = out + spec.lam * (s - 1.0)
    return out


def _dphi(spec: HyperExpSpec, th: np.ndarray) -> np.ndarray:
    out = spec.mu + spec.sigma ** 2 * th
    if spec.lam > 0:
        t = th[..., None]
        s = 0.0
        if spec.m:
            s = s + np.sum(spec.w_up * spec.r_up / (spec.r_up - t) ** 2, axis=-1)
        if spec.n:
            s = s - np.sum(spec.w_down * spec.r_down / (spec.r_down + t) ** 2, axis=-1)
        out = out + spec.lam * s
    return out


def _creeps_up(spec: HyperExpSpec) -> bool:
    return spec.sigma > 0 or spec.mu > 0


def _positive_roots(spec: HyperExpSpec, level: float, max_iter: int = 400) -> np.ndarray:
    """Roots of ``Phi = level`` on (0, inf), one per pole interval."""
    rates = spec.r_up if spec.lam > 0 else np.empty(0)
    f = lambda th: _phi(spec, th) - level
    lo = np.concatenate([[0.0], rates])
    hi = np.concatenate([rates, [np.inf]])
    if not _creeps_up(spec):
        lo, hi = lo[:-1], hi[:-1]
    if lo.size == 0:
        return np.empty(0)
    # step off the poles until the sign pattern (-, +) is established
    for arr, sgn in ((lo, +1.0), (hi, -1.0)):
        pole = arr > 0
        pole &= np.isfinite(arr)
        if not np.any(pole):
            continue
        off = np.full(arr.shape, 1e-9)
        fin = np.isfinite(arr)
        base = np.where(fin, arr, 1.0)
        for _ in range(60):
            cand = np.where(pole, base * (1 + sgn * off), base)
            val = f(cand)
            bad = pole & ((val >= 0) if sgn > 0 else (val <= 0))
            if not np.any(bad):
                break
            off = np.where(bad, off * 0.1, off)
        else:
            raise ConvergenceError("could not bracket root next to a pole")
        arr[:] = np.where(fin, cand, arr)
    if np.isinf(hi[-1]):
        top = max(2.0 * lo[-1], 1.0)
        for _ in range(2000):
            if f(np.array([top]))[0] > 0:
                break
            top *= 2.0
        else:
            raise ConvergenceError("outer root not bracketed by doubling")
        hi[-1] = top
    a, b = lo.copy(), hi.copy()
    for _ in range(max_iter):
        mid = 0.5 * (a + b)
        active = (mid > a) & (mid < b)
        if not np.any(active):
            break
        fm = f(mid)
        neg = fm < 0
        a = np.where(active & neg, mid, a)
        b = np.where(active & ~neg, mid, b)
    else:
        raise ConvergenceError("bisection iteration budget exhausted")
    # pick the better endpoint, then a guarded Newton polish
    fa, fb = f(a), f(b)
    x = np.where(np.abs(fa) <= np.abs(fb), a, b)
    for _ in range(3):
        fx = f(x)
        step = fx / _dphi(spec, x)
        cand = x - step
        ok = (cand >= lo) & (cand <= hi) & (np.abs(f(cand)) < np.abs(fx))
        x = np.where(ok, cand, x)
    return x


def find_roots(model: Union[HyperExpSpec, Diffusion], level: float) -> RootSet:
    """All real roots of ``Phi(theta) = level`` with interlacing brackets."""
    if not level > 0:
        raise DomainError("level must be positive")
    spec = as_hyperexp(model)
    up_roots = _positive_roots(spec, level)
    down_roots = -_positive_roots(spec.mirror(), level)
    return RootSet(float(level), up_roots, down_roots, regime_of(spec))


# ---------------------------------------------------------------------------
# weights

@dataclass(frozen=True)
class RandomizedFPP:
    """Exponential-sum representation of randomized passage probabilities.

    For ``Up`` and ``x <= ell`` each component equals
    ``sum_k w_k exp(roots_k (x - ell))``; for ``Down`` and ``x >= ell`` the
    same expression with the negative roots.
    """

    direction: Direction
    level: float
    roots: np.ndarray
    w_diffusion: np.ndarray
    w_jump_total: np.ndarray
    w_jump_by_type: np.ndarray  # shape (types, roots)
    jump_rates: np.ndarray

    @property
    def n_types(self) -> int:
        return self.w_jump_by_type.shape[0]


def _side(spec: HyperExpSpec, roots: RootSet, direction: Direction):
    """Positive roots and rates of the process viewed in the passage direction."""
    direction = Direction(direction)
    if direction is Direction.UP:
        return np.asarray(roots.up_roots), (spec.r_up if spec.lam > 0 else np.empty(0)), spec
    return -np.asarray(roots.down_roots), (spec.r_down if spec.lam > 0 else np.empty(0)), spec.mirror()


def build_dirichlet_matrix(model, roots: RootSet, direction) -> np.ndarray:
    """Boundary-condition matrix of the passage problem.

    The continuous-fit row of ones is present when the process can reach
    the barrier without overshoot; the remaining rows impose the expected
    behavior after a jump of each exponential type.
    """
    spec = as_hyperexp(model)
    r, a, s = _side(spec, roots, direction)
    K, m = r.size, a.size
    creeps = _creeps_up(s)
    if K != m + int(creeps):
        raise SingularityError(f"{K} roots inconsistent with {m} rates")
    diff = a[:, None] - r[None, :]
    if np.any(diff == 0):
        raise SingularityError("root coincides with a jump rate")
    rows = a[:, None] / diff
    if creeps:
        rows = np.vstack([np.ones(K), rows])
    return rows


def _signed_log(x: np.ndarray):
    return np.sign(x), np.log(np.abs(x))


def _closed_form_weights(r: np.ndarray, a: np.ndarray, creeps: bool):
    """Columns of the inverse boundary matrix as products of root/rate gaps.

    v0_k     = prod_i (a_i - r_k) / prod_{s!=k} (r_s - r_k)
    v_{i,k}  = prod_{s!=k} (r_s - a_i) prod_j (a_j - r_k)
               / (a_i prod_{s!=k} (r_s - r_k) prod_{j!=i} (a_j - a_i))
    Products are accumulated as sums of logs with tracked signs.
    """
    K, m = r.size, a.size
    # D_k = prod_{s!=k} (r_s - r_k)
    rr = r[:, None] - r[None, :]  # [s, k]
    np.fill_diagonal(rr, 1.0)
    sD, lD = _signed_log(rr)
    sD, lD = np.prod(sD, axis=0), np.sum(lD, axis=0)
    # P_k = prod_i (a_i - r_k)
    ar = a[:, None] - r[None, :]  # [i, k]
    sAR, lAR = _signed_log(ar)
    sP, lP = np.prod(sAR, axis=0), np.sum(lAR, axis=0)
    if creeps:
        v0 = sP * sD * np.exp(lP - lD)
    else:
        v0 = np.zeros(K)
    if m == 0:
        return v0, np.zeros((0, K))
    # E_i = prod_{j!=i} (a_j - a_i)
    aa = a[:, None] - a[None, :]  # [j, i]
    np.fill_diagonal(aa, 1.0)
    sE, lE = _signed_log(aa)
    sE, lE = np.prod(sE, axis=0), np.sum(lE, axis=0)
    # F_{i,k} = prod_{s!=k} (r_s - a_i) = prod_s (r_s - a_i) / (r_k - a_i)
    sRA, lRA = -sAR, lAR  # r_k - a_i
    sF = np.prod(sRA, axis=1)[:, None] * sRA
    lF = np.sum(lRA, axis=1)[:, None] - lRA
    sign = sF * sP[None, :] * sD[None, :] * sE[:, None]
    logv = lF + lP[None, :] - lD[None, :] - lE[:, None] - np.log(a)[:, None]
    return v0, sign * np.exp(logv)


def solve_weights(model, roots: RootSet, direction, method: str = "closed") -> RandomizedFPP:
    """Weights of the randomized passage probabilities for one direction.

    ``method="closed"`` uses the log-space product form; ``method="linear"``
    solves the boundary system directly (reference route, small sizes).
    """
    spec = as_hyperexp(model)
    direction = Direction(direction)
    r, a, s = _side(spec, roots, direction)
    creeps = _creeps_up(s)
    K, m = r.size, a.size
    if K != m + int(creeps):
        raise SingularityError(f"{K} roots inconsistent with {m} rates")
    if method == "closed":
        if np.any(a[:, None] == r[None, :]) or np.unique(r).size != K:
            raise SingularityError("duplicate roots or root on a pole")
        v0, vtypes = _closed_form_weights(r, a, creeps)
    elif method == "linear":
        A = build_dirichlet_matrix(spec, roots, direction)
        try:
            inv = np.linalg.solve(A, np.eye(K))
        except np.linalg.LinAlgError as exc:
            raise SingularityError(str(exc)) from exc
        if creeps:
            v0, vtypes = inv[:, 0], inv[:, 1:].T
        else:
            v0, vtypes = np.zeros(K), inv.T
    else:
        raise ValueError(f"unknown method {method!r}")
    signed_roots = r if direction is Direction.UP else -r
    return RandomizedFPP(direction, roots.level, signed_roots, v0,
                         vtypes.sum(axis=0), vtypes, a.copy())


def randomized_fpp(model, level: float, direction, method: str = "closed") -> RandomizedFPP:
    return solve_weights(model, find_roots(model, level), direction, method)


def lc_fpp(fpp: RandomizedFPP, component, x, ell):
    """Evaluate a component of the randomized passage probability.

    ``component`` is ``"all"``, ``"diffusion"``, ``"jump_total"`` or an
    integer jump-type index (rates ascending within the passage direction).
    """
    x = np.asarray(x, dtype=float)
    d = x - ell
    if fpp.direction is Direction.UP and np.any(d > 0):
        raise DomainError("upward passage requires x <= ell")
    if fpp.direction is Direction.DOWN and np.any(d < 0):
        raise DomainError("downward passage requires x >= ell")
    if component == "all":
        w, at_barrier = fpp.w_diffusion + fpp.w_jump_total, 1.0
    elif component == "diffusion":
        w, at_barrier = fpp.w_diffusion, 1.0
    elif component == "jump_total":
        w, at_barrier = fpp.w_jump_total, 0.0
    elif isinstance(component, (int, np.integer)):
        if not 0 <= component < fpp.n_types:
            raise DomainError(f"jump type {component} out of range")
        w, at_barrier = fpp.w_jump_by_type[component], 0.0
    else:
        raise ValueError(f"unknown component {component!r}")
    val = np.exp(np.multiply.outer(d, fpp.roots)) @ w
    val = np.where(d == 0, at_barrier, val)
    return float(val) if val.ndim == 0 else val


def boundary_residual(fpp: RandomizedFPP, model, x, ell) -> float:
    """Max residual of ``A^T LC(x) = e(x)`` for the component vector at ``x``."""
    spec = as_hyperexp(model)
    roots = fpp.roots
    if fpp.direction is Direction.UP:
        rs = RootSet(fpp.level, roots, np.empty(0), regime_of(spec))
    else:
        rs = RootSet(fpp.level, np.empty(0), roots, regime_of(spec))
    A = build_dirichlet_matrix(spec, rs, fpp.direction)
    comps = []
    if A.shape[0] == fpp.n_types + 1:
        comps.append(lc_fpp(fpp, "diffusion", x, ell))
    comps += [lc_fpp(fpp, i, x, ell) for i in range(fpp.n_types)]
    lc = np.array(comps)
    e = np.exp(roots * (x - ell))
    return float(np.max(np.abs(A.T @ lc - e)))
