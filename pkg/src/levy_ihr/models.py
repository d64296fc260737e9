"""Lévy model parameterizations, Laplace/Lévy exponents and scenario types.

All models are one-dimensional Lévy processes ``X`` started at zero. The
Laplace exponent is ``Phi(theta) = log E[exp(theta X_1)]`` and the Lévy
exponent is ``Psi(u) = -log E[exp(i u X_1)]`` so that ``Phi(theta) =
-Psi(-i theta)``.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Any, Union

import numpy as np
from scipy.special import gamma as gamma_fn

from .errors import DomainError, PoleError


def _cast_floats(obj, names) -> None:
    for name in names:
        object.__setattr__(obj, name, float(getattr(obj, name)))


def _as_tuple(values) -> tuple:
    return tuple(float(v) for v in np.atleast_1d(np.asarray(values, dtype=float))) if values is not None else ()


@dataclass(frozen=True)
class Diffusion:
    """Brownian motion with drift: ``X_t = mu t + sigma W_t``."""

    mu: float
    sigma: float

    def __post_init__(self):
        _cast_floats(self, ("mu", "sigma"))
        if not (self.sigma >= 0 and math.isfinite(self.sigma)):
            raise DomainError(f"sigma must be finite and >= 0, got {self.sigma}")
        if not math.isfinite(self.mu):
            raise DomainError("mu must be finite")


@dataclass(frozen=True)
class HyperExpSpec:
    """Hyper-exponential jump-diffusion.

    Jumps arrive at rate ``lam``; an upward jump of type i has probability
    ``up_weights[i]`` and size ~ Exp(``up_rates[i]``), a downward jump of type
    j has probability ``down_weights[j]`` and absolute size ~ Exp(``down_rates[j]``).
    ``mu`` is the linear drift of ``X`` (jumps are not compensated).
    """

    mu: float
    sigma: float
    lam: float = 0.0
    up_weights: tuple = field(default=())
    up_rates: tuple = field(default=())
    down_weights: tuple = field(default=())
    down_rates: tuple = field(default=())

    def __post_init__(self):
        for name in ("mu", "sigma", "lam"):
            object.__setattr__(self, name, float(getattr(self, name)))
        for name in ("up_weights", "up_rates", "down_weights", "down_rates"):
            object.__setattr__(self, name, _as_tuple(getattr(self, name)))
        if len(self.up_weights) != len(self.up_rates):
            raise DomainError("up_weights and up_rates differ in length")
        if len(self.down_weights) != len(self.down_rates):
            raise DomainError("down_weights and down_rates differ in length")
        if not (self.sigma >= 0 and math.isfinite(self.sigma)):
            raise DomainError(f"sigma must be finite and >= 0, got {self.sigma}")
        if not math.isfinite(self.mu):
            raise DomainError("mu must be finite")
        if not (self.lam >= 0 and math.isfinite(self.lam)):
            raise DomainError("lambda must be finite and >= 0")
        n_types = len(self.up_weights) + len(self.down_weights)
        if self.lam > 0:
            if n_types == 0:
                raise DomainError("positive jump intensity requires at least one jump type")
            w = np.array(self.up_weights + self.down_weights)
            if np.any(w <= 0):
                raise DomainError("jump weights must be strictly positive")
            if abs(w.sum() - 1.0) > 1e-12:
                raise DomainError(f"jump weights sum to {w.sum()!r}, expected 1")
        elif n_types:
            raise DomainError("jump types given with zero intensity")
        for rates in (self.up_rates, self.down_rates):
            r = np.array(rates)
            if np.any(r <= 0) or not np.all(np.isfinite(r)):
                raise DomainError("jump rates must be positive and finite")
            if np.any(np.diff(r) <= 0):
                raise DomainError("jump rates must be strictly increasing")

    # array views
    @property
    def w_up(self) -> np.ndarray:
        return np.array(self.up_weights)

    @property
    def r_up(self) -> np.ndarray:
        return np.array(self.up_rates)

    @property
    def w_down(self) -> np.ndarray:
        return np.array(self.down_weights)

    @property
    def r_down(self) -> np.ndarray:
        return np.array(self.down_rates)

    @property
    def m(self) -> int:
        return len(self.up_rates)

    @property
    def n(self) -> int:
        return len(self.down_rates)

    @property
    def scenario2_safe(self) -> bool:
        """True when the smallest upward rate exceeds one (finite upside e-moment)."""
        return self.m == 0 or self.up_rates[0] > 1.0

    def mirror(self) -> "HyperExpSpec":
        """Spec of ``-X``: up and down jump types swap, drift flips sign."""
        return HyperExpSpec(-self.mu, self.sigma, self.lam, self.down_weights,
                            self.down_rates, self.up_weights, self.up_rates)


@dataclass(frozen=True)
class VG:
    """Variance gamma in (C, G, M) form with linear drift."""

    C: float
    G: float
    M: float
    drift: float = 0.0

    def __post_init__(self):
        _cast_floats(self, ("C", "G", "M", "drift"))
        if not (self.C > 0 and self.G > 0 and self.M > 0):
            raise DomainError("VG requires C, G, M > 0")


@dataclass(frozen=True)
class CGMY:
    """CGMY (tempered stable) model with linear drift; ``0 <= Y < 2``, ``Y != 1``."""

    C: float
    G: float
    M: float
    Y: float
    drift: float = 0.0

    def __post_init__(self):
        _cast_floats(self, ("C", "G", "M", "Y", "drift"))
        if not (self.C > 0 and self.G > 0 and self.M > 0):
            raise DomainError("CGMY requires C, G, M > 0")
        if not (0 <= self.Y < 2):
            raise DomainError("CGMY requires 0 <= Y < 2")
        if self.Y == 1:
            # Gamma(-Y) has a pole; the Y=1 limit needs a log form not supported here
            raise DomainError("CGMY with Y == 1 is not supported")


ModelSpec = Union[Diffusion, HyperExpSpec, VG, CGMY]


def kou(mu: float, sigma: float, lam: float, p: float, xi: float, eta: float) -> HyperExpSpec:
    """Double-exponential (Kou) jump-diffusion."""
    return HyperExpSpec(mu, sigma, lam, (p,), (xi,), (1.0 - p,), (eta,))


def as_hyperexp(model: ModelSpec) -> HyperExpSpec:
    """View a diffusion as a jump-free HEJD; HEJD passes through."""
    if isinstance(model, HyperExpSpec):
        return model
    if isinstance(model, Diffusion):
        return HyperExpSpec(model.mu, model.sigma)
    raise TypeError(f"{type(model).__name__} is not hyper-exponential")


def diffusion_sigma(model: ModelSpec) -> float:
    return float(getattr(model, "sigma", 0.0))


def _cumulant_fn(model: ModelSpec, z):
    """``log E[exp(z X_1)]`` for complex ``z`` (no domain checks)."""
    z = np.asarray(z, dtype=complex)
    if isinstance(model, Diffusion):
        return model.mu * z + 0.5 * model.sigma ** 2 * z * z
    if isinstance(model, HyperExpSpec):
        out = model.mu * z + 0.5 * model.sigma ** 2 * z * z
        if model.lam > 0:
            zz = z[..., None]
            jump = np.sum(model.w_up * model.r_up / (model.r_up - zz), axis=-1) if model.m else 0.0
            jump = jump + (np.sum(model.w_down * model.r_down / (model.r_down + zz), axis=-1) if model.n else 0.0)
            out = out + model.lam * (jump - 1.0)
        return out
    if isinstance(model, VG) or (isinstance(model, CGMY) and model.Y == 0):
        return model.drift * z - model.C * (np.log(1 - z / model.M) + np.log(1 + z / model.G))
    if isinstance(model, CGMY):
        Y = model.Y
        return model.drift * z + model.C * gamma_fn(-Y) * (
            (model.M - z) ** Y - model.M ** Y + (model.G + z) ** Y - model.G ** Y)
    raise TypeError(f"unknown model type {type(model).__name__}")


def laplace_exponent(model: ModelSpec, theta):
    """Laplace exponent ``Phi(theta) = log E[exp(theta X_1)]``.

    HEJD is evaluated as its rational continuation everywhere except at the
    poles ``xi_i`` and ``-eta_j``; VG/CGMY require ``-G < theta < M``.
    """
    th = np.asarray(theta, dtype=float)
    if isinstance(model, HyperExpSpec) and model.lam > 0:
        poles = np.concatenate([model.r_up, -model.r_down])
        if np.any(th[..., None] == poles):
            raise PoleError(f"theta hits a pole of the Laplace exponent: {theta}")
    if isinstance(model, (VG, CGMY)):
        if np.any(th <= -model.G) or np.any(th >= model.M):
            raise DomainError(f"theta outside analyticity strip (-{model.G}, {model.M})")
    out = np.real(_cumulant_fn(model, th))
    out = np.where(th == 0, 0.0, out)
    return float(out) if np.ndim(out) == 0 else out


def levy_exponent(model: ModelSpec, theta):
    """Lévy exponent ``Psi(theta) = -log E[exp(i theta X_1)]`` for real theta."""
    th = np.asarray(theta, dtype=float)
    out = -_cumulant_fn(model, 1j * th)
    out = np.where(th == 0, 0.0 + 0.0j, out)
    return complex(out) if np.ndim(out) == 0 else out


def char_function(model: ModelSpec, u, t: float = 1.0):
    """``E[exp(i u X_t)]``."""
    return np.exp(t * _cumulant_fn(model, 1j * np.asarray(u, dtype=float)))


def cumulants(model: ModelSpec) -> tuple[float, float, float]:
    """First, second and fourth cumulants of ``X_1``."""
    if isinstance(model, Diffusion):
        return model.mu, model.sigma ** 2, 0.0
    if isinstance(model, HyperExpSpec):
        c1, c2, c4 = model.mu, model.sigma ** 2, 0.0
        if model.lam > 0:
            wu, ru, wd, rd = model.w_up, model.r_up, model.w_down, model.r_down
            c1 += model.lam * (np.sum(wu / ru) - np.sum(wd / rd))
            c2 += model.lam * (np.sum(2 * wu / ru ** 2) + np.sum(2 * wd / rd ** 2))
            c4 = model.lam * (np.sum(24 * wu / ru ** 4) + np.sum(24 * wd / rd ** 4))
        return float(c1), float(c2), float(c4)
    if isinstance(model, (VG, CGMY)):
        Y = model.Y if isinstance(model, CGMY) else 0.0
        C, G, M = model.C, model.G, model.M
        if Y == 0:
            k = lambda n: C * math.factorial(n - 1) * (M ** -n + (-1) ** n * G ** -n)
        else:
            k = lambda n: C * gamma_fn(n - Y) * (M ** (Y - n) + (-1) ** n * G ** (Y - n))
        return float(model.drift + k(1)), float(k(2)), float(k(4))
    raise TypeError(f"unknown model type {type(model).__name__}")


def jump_density(model: ModelSpec, y):
    """Lévy density of the jump part at jump size ``y`` (nonzero)."""
    y = np.asarray(y, dtype=float)
    if isinstance(model, Diffusion):
        return np.zeros_like(y)
    if isinstance(model, HyperExpSpec):
        a = np.abs(y)[..., None]
        up = np.sum(model.w_up * model.r_up * np.exp(-model.r_up * a), axis=-1) if model.m else 0.0
        dn = np.sum(model.w_down * model.r_down * np.exp(-model.r_down * a), axis=-1) if model.n else 0.0
        return model.lam * np.where(y > 0, up, dn)
    Y = model.Y if isinstance(model, CGMY) else 0.0
    a = np.abs(y)
    rate = np.where(y > 0, model.M, model.G)
    return model.C * np.exp(-rate * a) / a ** (1 + Y)


# ---------------------------------------------------------------------------
# scenarios

class ScenarioKind(str, enum.Enum):
    DIRECT = "direct"
    LONG = "long"
    SHORT = "short"


@dataclass(frozen=True)
class Scenario:
    """P&L mapping of the driving process.

    * ``DIRECT``: P&L_t = z + X_t
    * ``LONG``:   P&L_t = z1 exp(X_t) - z2 with z1 = z2 + z
    * ``SHORT``:  P&L_t = z2 - z1 exp(X_t) with z1 = z2 - z
    """

    kind: ScenarioKind
    z: float = 0.0
    z2: float = 0.0
    z1: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", ScenarioKind(self.kind))
        if self.kind is ScenarioKind.DIRECT:
            return
        if self.z2 < 0:
            raise DomainError("z2 must be nonnegative")
        implied = self.z2 + self.z if self.kind is ScenarioKind.LONG else self.z2 - self.z
        if implied <= 0:
            raise DomainError("initial P&L outside scenario range")
        if self.z1 is None:
            object.__setattr__(self, "z1", implied)
        elif abs(self.z1 - implied) > 1e-12 * max(1.0, abs(implied)):
            raise DomainError(f"z1={self.z1} inconsistent with z and z2 (expected {implied})")

    @classmethod
    def direct(cls, z: float = 0.0) -> "Scenario":
        return cls(ScenarioKind.DIRECT, z)

    @classmethod
    def long(cls, z: float = 0.0, z2: float = 1.0) -> "Scenario":
        return cls(ScenarioKind.LONG, z, z2)

    @classmethod
    def short(cls, z: float = 0.0, z2: float = 1.0) -> "Scenario":
        return cls(ScenarioKind.SHORT, z, z2)


@dataclass(frozen=True)
class WellDefinedness:
    ok: bool
    reasons: list


def _upside_moment_ok(model: ModelSpec) -> bool:
    """Is there theta* > 1 with E[exp(theta* X_1)] finite?"""
    if isinstance(model, Diffusion):
        return True
    if isinstance(model, HyperExpSpec):
        return model.m == 0 or model.lam == 0 or model.up_rates[0] > 1.0
    return model.M > 1.0


def check_ies_well_defined(model: ModelSpec, scenario: Scenario) -> WellDefinedness:
    """Sufficient condition for a finite intra-horizon expected shortfall.

    Long positions lose at most ``z2``. Direct exposure only needs a finite
    first moment of the running minimum, which every supported model has
    (all have exponentially decaying downside tails). Short positions need an
    upside exponential moment of order strictly above one.
    """
    if scenario.kind is ScenarioKind.SHORT and not _upside_moment_ok(model):
        return WellDefinedness(False, ["no θ*>1 with finite upside exponential moment"])
    return WellDefinedness(True, [])


# ---------------------------------------------------------------------------
# JSON

_VARIANT_NAMES = {HyperExpSpec: "kou", VG: "vg", CGMY: "cgmy", Diffusion: "diffusion"}


def model_to_dict(model: ModelSpec) -> dict:
    if isinstance(model, HyperExpSpec):
        params = {"mu": model.mu, "sigma": model.sigma, "lambda": model.lam,
                  "up_weights": list(model.up_weights), "up_rates": list(model.up_rates),
                  "down_weights": list(model.down_weights), "down_rates": list(model.down_rates)}
    elif isinstance(model, Diffusion):
        params = {"mu": model.mu, "sigma": model.sigma}
    elif isinstance(model, VG):
        params = {"C": model.C, "G": model.G, "M": model.M, "drift": model.drift}
    elif isinstance(model, CGMY):
        params = {"C": model.C, "G": model.G, "M": model.M, "Y": model.Y, "drift": model.drift}
    else:
        raise TypeError(f"unknown model type {type(model).__name__}")
    return {"variant": _VARIANT_NAMES[type(model)], "params": params}


def model_from_dict(doc: dict[str, Any]) -> ModelSpec:
    try:
        variant = doc["variant"].lower()
        params = dict(doc["params"])
    except (KeyError, AttributeError, TypeError) as exc:
        raise DomainError(f"malformed model document: {exc}") from exc
    if variant == "kou":
        lam = params.pop("lambda", 0.0)
        return HyperExpSpec(lam=lam, **params)
    if variant == "diffusion":
        return Diffusion(**params)
    if variant == "vg":
        return VG(**params)
    if variant == "cgmy":
        return CGMY(**params)
    raise DomainError(f"unknown variant {variant!r}")


def model_to_json(model: ModelSpec) -> str:
    return json.dumps(model_to_dict(model), sort_keys=True)


def model_from_json(text: str) -> ModelSpec:
    return model_from_dict(json.loads(text))
