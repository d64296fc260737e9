"""Monte Carlo first-passage oracle for hyper-exponential jump-diffusions.

Paths are simulated on their exact jump skeleton. Between jumps the
diffusion crossing is decided with the Brownian-bridge hitting probability
(or exactly, for a pure drift), so there is no time-discretization bias.
Each crossing is classified as continuous (no overshoot) or as an
overshooting jump of a particular exponential type.

Randomness is organized in fixed-size chunks; chunk ``c`` draws from a
Philox stream keyed by ``(seed, c)`` so results do not depend on the worker
count.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DomainError
from .hejd import Direction
from .models import HyperExpSpec, as_hyperexp


@dataclass(frozen=True)
class McConfig:
    n_paths: int = 1_000_000
    seed: int = 0
    bridge_correction: bool = True
    horizon: float = 1.0
    # if set, each path uses an independent Exp(rate) horizon instead of ``horizon``
    exp_horizon_rate: float | None = None
    # monitoring grid (per unit ``horizon``) used when bridge_correction is off
    n_monitor: int = 1000
    chunk_size: int = 1 << 16
    threads: int = 1

    def __post_init__(self):
        if self.n_paths < 1:
            raise DomainError("n_paths must be >= 1")
        if not self.horizon > 0:
            raise DomainError("horizon must be positive")


@dataclass(frozen=True)
class McResult:
    p_hat: float
    stderr: float
    p_diffusion_hat: float
    stderr_diffusion: float
    p_jump_by_type_hat: list
    stderr_jump_by_type: list
    n_paths: int
    direction: str

    @property
    def p_jump_hat(self) -> float:
        return float(sum(self.p_jump_by_type_hat))

    def to_dict(self) -> dict:
        return asdict(self)


def _rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(chunk)])))


def _binom_se(p: float, n: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0) / n)


def _chunk_down(spec: HyperExpSpec, dist: float, cfg: McConfig, chunk: int, n: int) -> np.ndarray:
    """Per-type crossing counts for a downward barrier at distance ``dist``.

    Returns counts ``[diffusion, type_0, ..., type_{n-1}]`` over ``n`` paths.
    """
    rng = _rng(cfg.seed, chunk)
    mu, sig, lam = spec.mu, spec.sigma, spec.lam
    probs = np.concatenate([spec.w_up, spec.w_down]) if lam > 0 else np.empty(0)
    m = spec.m
    n_down = spec.n if lam > 0 else 0
    counts = np.zeros(1 + n_down, dtype=np.int64)
    if cfg.exp_horizon_rate is not None:
        H = rng.exponential(1.0 / cfg.exp_horizon_rate, n)
    else:
        H = np.full(n, cfg.horizon)
    y = np.full(n, float(dist))
    t = np.zeros(n)
    if dist <= 0:
        counts[0] = n
        return counts
    h_mon = cfg.horizon / cfg.n_monitor
    while y.size:
        k = y.size
        wait = rng.exponential(1.0 / lam, k) if lam > 0 else np.full(k, np.inf)
        seg_end = np.minimum(t + wait, H)
        dt = seg_end - t
        if sig > 0 and cfg.bridge_correction:
            z = rng.standard_normal(k)
            b = y + mu * dt + sig * np.sqrt(dt) * z
            with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
                pc = np.where(b <= 0, 1.0, np.exp(-2.0 * y * b / (sig * sig * dt)))
            u = rng.random(k)
            hit = u < pc
        elif sig > 0:
            b = y.copy()
            rem = dt.copy()
            hit = np.zeros(k, dtype=bool)
            while np.any(rem > 0):
                step = np.minimum(h_mon, rem)
                z = rng.standard_normal(k)
                live = rem > 0
                b = np.where(live, b + mu * step + sig * np.sqrt(step) * z, b)
                hit |= live & (b <= 0)
                rem = np.where(live, rem - step, 0.0)
        else:
            b = y + mu * dt
            hit = b <= 0
        counts[0] += int(np.count_nonzero(hit))
        jumped = ~hit & (t + wait < H)
        y, t, H = b[jumped], seg_end[jumped], H[jumped]
        if y.size == 0:
            break
        kind = rng.choice(probs.size, size=y.size, p=probs)
        rates = np.concatenate([spec.r_up, spec.r_down])[kind]
        size = rng.exponential(1.0, y.size) / rates
        y = np.where(kind < m, y + size, y - size)
        crossed = y < 0
        if np.any(crossed):
            counts[1:] += np.bincount(kind[crossed] - m, minlength=n_down)
        y, t, H = y[~crossed], t[~crossed], H[~crossed]
    return counts


def simulate_fpp(model, x: float, ell: float, direction, config: McConfig) -> McResult:
    """Probability that ``X`` started at ``x`` crosses ``ell`` before the horizon."""
    spec = as_hyperexp(model)
    direction = Direction(direction)
    if direction is Direction.UP:
        spec, dist = spec.mirror(), ell - x
    else:
        dist = x - ell
    sizes = [config.chunk_size] * (config.n_paths // config.chunk_size)
    if config.n_paths % config.chunk_size:
        sizes.append(config.n_paths % config.chunk_size)
    jobs = list(enumerate(sizes))
    run = lambda job: _chunk_down(spec, dist, config, job[0], job[1])
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as ex:
            parts = list(ex.map(run, jobs))
    else:
        parts = [run(j) for j in jobs]
    counts = np.zeros_like(parts[0])
    for c in parts:  # fixed merge order
        counts += c
    n = config.n_paths
    p_types = counts[1:] / n
    p_diff = counts[0] / n
    p = counts.sum() / n
    return McResult(float(p), _binom_se(p, n), float(p_diff), _binom_se(p_diff, n),
                    [float(v) for v in p_types], [_binom_se(v, n) for v in p_types],
                    n, direction.value)


def sample_increments(model, dt: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Exact draws of ``X_dt`` for a hyper-exponential jump-diffusion."""
    spec = as_hyperexp(model)
    out = spec.mu * dt + spec.sigma * math.sqrt(dt) * rng.standard_normal(size)
    if spec.lam > 0:
        counts = rng.poisson(spec.lam * dt, size)
        total = int(counts.sum())
        if total:
            probs = np.concatenate([spec.w_up, spec.w_down])
            kind = rng.choice(probs.size, size=total, p=probs)
            rates = np.concatenate([spec.r_up, spec.r_down])[kind]
            jumps = rng.exponential(1.0, total) / rates
            jumps = np.where(kind < spec.m, jumps, -jumps)
            owner = np.repeat(np.arange(size), counts)
            out += np.bincount(owner, weights=jumps, minlength=size)
    return out
