"""Independent reference computations used to derive and cross-check expected values.

Nothing here imports the package's numerical routines: each oracle uses a
different method (scalar root brackets, literal polynomial formulas, exact
rational arithmetic, closed-form Gaussian results).
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq
from scipy.stats import norm


# --- Laplace exponent of a hyper-exponential jump-diffusion, scalar form -----

def phi_scalar(th, mu, sigma, lam, w_up, r_up, w_down, r_down):
    jump = sum(w * r / (r - th) for w, r in zip(w_up, r_up)) + sum(w * r / (r + th) for w, r in zip(w_down, r_down))
    return mu * th + 0.5 * sigma * sigma * th * th + lam * (jump - 1.0)


def phi_exact(th, mu, sigma, lam, w_up, r_up, w_down, r_down) -> Fraction:
    F = lambda v: Fraction(v).limit_denominator(10 ** 12) if isinstance(v, float) else Fraction(v)
    th, mu, sigma, lam = F(th), F(mu), F(sigma), F(lam)
    jump = sum(F(w) * F(x) / (F(x) - th) for w, x in zip(w_up, r_up))
    jump += sum(F(w) * F(e) / (F(e) + th) for w, e in zip(w_down, r_down))
    return mu * th + sigma * sigma * th * th / 2 + lam * (jump - 1)


def roots_brentq(mu, sigma, lam, w_up, r_up, w_down, r_down, level):
    """Roots of ``Phi = level`` bracketed pole by pole and refined by brentq (sigma > 0)."""
    f = lambda t: phi_scalar(t, mu, sigma, lam, w_up, r_up, w_down, r_down) - level
    eps = 1e-10
    up_roots, edges = [], [0.0] + list(r_up)
    for a, c in zip(edges[:-1], edges[1:]):
        up_roots.append(brentq(f, a + eps * c if a == 0 else a * (1 + eps), c * (1 - eps), xtol=1e-15, rtol=1e-15))
    lo = r_up[-1] * (1 + eps) if len(r_up) else eps
    hi = 2 * lo + 1
    while f(hi) < 0:
        hi *= 2
    up_roots.append(brentq(f, lo, hi, xtol=1e-15, rtol=1e-15))
    down_roots, edges = [], [0.0] + [-e for e in r_down]
    for a, c in zip(edges[:-1], edges[1:]):
        down_roots.append(brentq(f, c * (1 - eps), a - eps * abs(c) if a == 0 else a * (1 + eps),
                             xtol=1e-15, rtol=1e-15))
    hi = -r_down[-1] * (1 + eps) if len(r_down) else -eps
    lo = 2 * hi - 1
    while f(lo) < 0:
        lo *= 2
    down_roots.append(brentq(f, lo, hi, xtol=1e-15, rtol=1e-15))
    return np.array(up_roots), np.array(down_roots)


# --- literal polynomial closed form for the per-type weights (sigma > 0) -----

def _dprod(vals, x):
    """Derivative of prod(vals - x) in x."""
    vals = np.asarray(vals)
    return -sum(np.prod(np.delete(vals - x, i)) for i in range(vals.size))


def per_type_weights_up(up_roots, rates, v0):
    """Upward per-type weights from the rate and root polynomials and their derivatives."""
    m = len(rates)
    rate_poly = lambda x: np.prod(rates - x)
    root_poly = lambda x: np.prod(up_roots[1:] - x)
    rate_poly_d = lambda x: _dprod(rates, x)
    root_poly_d = lambda x: _dprod(up_roots[1:], x)
    out = np.zeros((m, m + 1))
    for i in range(m):
        scale = -root_poly(rates[i]) / (rates[i] * rate_poly_d(rates[i]))
        out[i, 0] = scale * v0[0]
        for k in range(1, m + 1):
            coef = -rate_poly(up_roots[k]) * root_poly(rates[i]) / ((rates[i] - up_roots[k]) * rate_poly_d(rates[i]) * root_poly_d(up_roots[k]))
            out[i, k] = scale * v0[k] + coef / rates[i]
    return out


def per_type_weights_down(down_roots, rates, v0):
    """Downward analogue with rate_poly(x) = prod(rates + x), root_poly(x) = prod(roots[1:] + x)."""
    n = len(rates)
    rate_poly = lambda x: np.prod(rates + x)
    root_poly = lambda x: np.prod(down_roots[1:] + x)
    rate_poly_d = lambda x: sum(np.prod(np.delete(rates + x, i)) for i in range(n))
    root_poly_d = lambda x: sum(np.prod(np.delete(down_roots[1:] + x, i)) for i in range(n))
    out = np.zeros((n, n + 1))
    for j in range(n):
        scale = (-1) ** n * root_poly(rates[j]) / (rates[j] * rate_poly_d(-rates[j]))
        out[j, 0] = scale * v0[0]
        for k in range(1, n + 1):
            coef = rate_poly(down_roots[k]) * root_poly(rates[j]) / ((rates[j] + down_roots[k]) * rate_poly_d(-rates[j]) * root_poly_d(-down_roots[k]))
            out[j, k] = scale * v0[k] + coef / rates[j]
    return out


def diffusion_weight_first_up(up_roots, rates):
    """First diffusion weight ``rate_poly(r_1) / root_poly(r_1)``."""
    return np.prod(rates - up_roots[0]) / np.prod(up_roots[1:] - up_roots[0])


# --- Gaver-Stehfest in exact arithmetic ---------------------------------------

def stehfest_exact(N: int) -> list[Fraction]:
    out = []
    for k in range(1, 2 * N + 1):
        s = sum(Fraction(j ** (N + 1) * math.comb(N, j) * math.comb(2 * j, j) * math.comb(j, k - j),
                         math.factorial(N))
                for j in range((k + 1) // 2, min(k, N) + 1))
        out.append((-1) ** (N + k) * s / k)
    return out


# --- Brownian closed forms ----------------------------------------------------

def bm_passage(dist, sigma, t):
    """Reflection principle: P(min_{s<=t} sigma W_s <= -dist)."""
    return 2.0 * norm.cdf(-dist / (sigma * math.sqrt(t)))


def bm_ivar(alpha, sigma=1.0, t=1.0):
    return -sigma * math.sqrt(t) * norm.ppf(alpha / 2.0)


def bm_ies(alpha, sigma=1.0, t=1.0):
    q = bm_ivar(alpha, 1.0, 1.0)
    return sigma * math.sqrt(t) * 2.0 * norm.pdf(q) / alpha


def normal_var_es(alpha, sigma=1.0, t=1.0):
    q = norm.ppf(alpha)
    s = sigma * math.sqrt(t)
    return -s * q, s * norm.pdf(q) / alpha
