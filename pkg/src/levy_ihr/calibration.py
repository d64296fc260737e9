"""Price ingestion and maximum-likelihood calibration of Lévy models.

The likelihood of i.i.d. log-returns uses the COS density of ``X_dt``.
Parameters are optimized with Nelder-Mead in an unconstrained transformed
space (log for positive quantities, logit for probabilities, ``log(M - 1)``
style shifts where a rate must exceed one).
"""
from __future__ import annotations

import csv
import datetime as _dt
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit, logit
from scipy.special import gamma as gamma_fn

from .cos import DENSITY_FLOOR, cos_density, cos_expansion, cos_range  # noqa: F401
from .errors import DomainError, EmptySeriesError, LevyIHRError, ParseError
from .models import CGMY, VG, Diffusion, HyperExpSpec, ModelSpec, kou

log = logging.getLogger(__name__)

FREQUENCY_DT = {"weekly": 1.0 / 52.0, "daily": 1.0 / 252.0}


# ---------------------------------------------------------------------------
# data

@dataclass(frozen=True)
class ReturnSeries:
    dates: tuple  # date of the closing price of each return
    log_returns: np.ndarray
    period_dt: float

    def __post_init__(self):
        if len(self.dates) != len(self.log_returns):
            raise DomainError("dates and returns differ in length")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise DomainError("dates must be strictly increasing")
        if not np.all(np.isfinite(self.log_returns)):
            raise DomainError("returns must be finite")

    def __len__(self) -> int:
        return len(self.log_returns)

    @classmethod
    def from_prices(cls, dates, prices, period_dt: float) -> "ReturnSeries":
        prices = np.asarray(prices, dtype=float)
        if prices.size < 2:
            raise EmptySeriesError("need at least two prices")
        return cls(tuple(dates[1:]), np.diff(np.log(prices)), period_dt)


def ingest_prices(csv_path, frequency: str = "weekly") -> ReturnSeries:
    """Read ``date,price`` rows and build log returns at the given frequency.

    Weekly sampling keeps the last observation of each ISO week.
    """
    if frequency not in FREQUENCY_DT:
        raise DomainError(f"unknown frequency {frequency!r}")
    rows = []
    with open(csv_path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise EmptySeriesError("empty file")
        if [h.strip().lower() for h in header] != ["date", "price"]:
            raise ParseError("header must be 'date,price'", 1)
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise ParseError(f"expected 2 fields, got {len(row)}", lineno)
            try:
                day = _dt.date.fromisoformat(row[0].strip())
            except ValueError:
                raise ParseError(f"bad ISO date {row[0]!r}", lineno) from None
            try:
                price = float(row[1])
            except ValueError:
                raise ParseError(f"bad price {row[1]!r}", lineno) from None
            if not (price > 0 and math.isfinite(price)):
                raise ParseError(f"price must be positive, got {row[1]!r}", lineno)
            rows.append((day, price, lineno))
    rows.sort(key=lambda r: r[0])
    for a, b in zip(rows, rows[1:]):
        if a[0] == b[0]:
            raise ParseError(f"duplicate date {b[0].isoformat()}", b[2])
    if frequency == "weekly":
        last = {}
        for day, price, _ in rows:
            last[day.isocalendar()[:2]] = (day, price)
        rows = [(d, p, 0) for d, p in sorted(last.values())]
    if len(rows) < 2:
        raise EmptySeriesError("fewer than two usable prices")
    return ReturnSeries.from_prices([r[0] for r in rows], [r[1] for r in rows], FREQUENCY_DT[frequency])


def write_prices_csv(path, dates, prices) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date", "price"])
        for d, p in zip(dates, prices):
            w.writerow([d.isoformat(), repr(float(p))])


# ---------------------------------------------------------------------------
# parameterizations

@dataclass(frozen=True)
class _Param:
    names: tuple
    lower: np.ndarray  # bounds in transformed space
    upper: np.ndarray

    def clip(self, v: np.ndarray) -> np.ndarray:
        return np.clip(v, self.lower, self.upper)

    def at_bound(self, v: np.ndarray, tol: float = 1e-6) -> bool:
        return bool(np.any(v <= self.lower + tol) or np.any(v >= self.upper - tol))


_L = math.log
_PARAMS = {
    "kou": _Param(("mu", "sigma", "lambda", "p", "xi", "eta"),
                  np.array([-50, _L(1e-4), _L(1e-3), -20, _L(1e-3), _L(1e-2)]),
                  np.array([50, _L(5.0), _L(1e4), 20, _L(1e5), _L(1e5)])),
    "vg": _Param(("C", "G", "M", "drift"),
                 np.array([_L(1e-3), _L(1e-2), _L(1e-3), -50]),
                 np.array([_L(1e5), _L(1e5), _L(1e5), 50])),
    "cgmy": _Param(("C", "G", "M", "Y", "drift"),
                   np.array([_L(1e-4), _L(1e-2), _L(1e-3), -50]),
                   np.array([_L(1e5), _L(1e5), _L(1e5), 50])),
    "diffusion": _Param(("mu", "sigma"), np.array([-50, _L(1e-4)]), np.array([50, _L(5.0)])),
}

VARIANTS = tuple(_PARAMS)


def param_names(variant: str) -> tuple:
    return _PARAMS[variant].names


def model_params(model: ModelSpec) -> dict:
    """Flat parameter dictionary in CSV column order."""
    if isinstance(model, HyperExpSpec):
        if model.m != 1 or model.n != 1:
            raise DomainError("flat parameters need a one-up/one-down jump spec")
        return {"mu": model.mu, "sigma": model.sigma, "lambda": model.lam,
                "p": model.up_weights[0], "xi": model.up_rates[0], "eta": model.down_rates[0]}
    if isinstance(model, Diffusion):
        return {"mu": model.mu, "sigma": model.sigma}
    if isinstance(model, VG):
        return {"C": model.C, "G": model.G, "M": model.M, "drift": model.drift}
    if isinstance(model, CGMY):
        return {"C": model.C, "G": model.G, "M": model.M, "Y": model.Y, "drift": model.drift}
    raise TypeError(type(model).__name__)


def model_from_params(variant: str, params: dict) -> ModelSpec:
    g = lambda k: float(params[k])
    if variant == "kou":
        return kou(g("mu"), g("sigma"), g("lambda"), g("p"), g("xi"), g("eta"))
    if variant == "diffusion":
        return Diffusion(g("mu"), g("sigma"))
    if variant == "vg":
        return VG(g("C"), g("G"), g("M"), g("drift"))
    if variant == "cgmy":
        return CGMY(g("C"), g("G"), g("M"), g("Y"), g("drift"))
    raise DomainError(f"unknown variant {variant!r}")


def _to_model(variant: str, v: np.ndarray, fix_y: float) -> ModelSpec:
    e = np.exp
    if variant == "kou":
        return kou(v[0], e(v[1]), e(v[2]), float(expit(v[3])), 1.0 + e(v[4]), e(v[5]))
    if variant == "vg":
        return VG(e(v[0]), e(v[1]), 1.0 + e(v[2]), v[3])
    if variant == "cgmy":
        return CGMY(e(v[0]), e(v[1]), 1.0 + e(v[2]), fix_y, v[3])
    return Diffusion(v[0], e(v[1]))


def _from_model(variant: str, model: ModelSpec) -> np.ndarray:
    L = np.log
    if variant == "kou":
        pr = model_params(model)
        return np.array([pr["mu"], L(pr["sigma"]), L(pr["lambda"]), logit(pr["p"]),
                         L(pr["xi"] - 1.0), L(pr["eta"])])
    if variant in ("vg", "cgmy"):
        return np.array([L(model.C), L(model.G), L(model.M - 1.0), model.drift])
    return np.array([model.mu, L(model.sigma)])


def moment_initial(variant: str, returns: np.ndarray, dt: float, fix_y: float = 0.5) -> ModelSpec:
    """Crude moment-matched starting point."""
    m = float(np.mean(returns)) / dt
    var = max(float(np.var(returns)), 1e-12) / dt
    if variant == "diffusion":
        return Diffusion(m, math.sqrt(var))
    if variant == "kou":
        lam, p = 10.0, 0.4
        eta = math.sqrt(4.0 * lam / var)
        xi = max(eta, 1.5)
        mu = m - lam * (p / xi - (1 - p) / eta)
        return kou(mu, math.sqrt(0.5 * var), lam, p, xi, eta)
    if variant == "vg":
        C = 50.0
        G = math.sqrt(2.0 * C / var)
        M = max(G, 1.5)
        return VG(C, G, M, m - C * (1 / M - 1 / G))
    if variant == "cgmy":
        C, Y = 5.0, fix_y
        G = (var / (2.0 * C * gamma_fn(2.0 - Y))) ** (1.0 / (Y - 2.0))
        M = max(G, 1.5)
        drift = m - C * gamma_fn(1.0 - Y) * (M ** (Y - 1) - G ** (Y - 1))
        return CGMY(C, G, M, Y, drift)
    raise DomainError(f"unknown variant {variant!r}")


# ---------------------------------------------------------------------------
# likelihood

def neg_log_likelihood(model: ModelSpec, returns, dt: float) -> float:
    """Mean negative log COS density; the range is widened to cover the data."""
    x = np.asarray(returns, dtype=float)
    a, b = cos_range(model, dt)
    a, b = min(a, float(x.min())), max(b, float(x.max()))
    dens = cos_expansion(model, dt, a=a, b=b).pdf(x, check=False)
    return float(-np.mean(np.log(np.maximum(dens, DENSITY_FLOOR))))


@dataclass(frozen=True)
class CalibrationResult:
    model: ModelSpec | None
    neg_log_lik: float
    window: tuple
    converged: bool
    iterations: int
    variant: str = ""
    message: str = ""


@dataclass(frozen=True)
class FitConfig:
    n_starts: int = 5
    seed: int = 0
    fix_y: float = 0.5
    max_iter: int = 3000
    jitter: float = 0.5


def _window_slice(series: ReturnSeries, window) -> tuple[int, int]:
    if window is None:
        return 0, len(series)
    start, end = window
    if isinstance(start, _dt.date):
        idx = [i for i, d in enumerate(series.dates) if start <= d <= end]
        if not idx:
            raise DomainError("window selects no observations")
        return idx[0], idx[-1] + 1
    return int(start), int(end)


def mle_fit(series: ReturnSeries, variant: str, window=None, init: ModelSpec | None = None,
            config: FitConfig | None = None) -> CalibrationResult:
    """Multistart Nelder-Mead maximum likelihood on one window."""
    cfg = config or FitConfig()
    if variant not in _PARAMS:
        raise DomainError(f"unknown variant {variant!r}")
    s, e = _window_slice(series, window)
    x = series.log_returns[s:e]
    if x.size < 52:
        raise DomainError("window must contain at least 52 observations")
    dt = series.period_dt
    par = _PARAMS[variant]

    def objective(v):
        try:
            val = neg_log_likelihood(_to_model(variant, par.clip(v), cfg.fix_y), x, dt)
        except (LevyIHRError, ValueError, OverflowError, ZeroDivisionError):
            return 1e10
        return val if math.isfinite(val) else 1e10

    base = init if init is not None else moment_initial(variant, x, dt, cfg.fix_y)
    v0 = par.clip(_from_model(variant, base))
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([cfg.seed, s, e])))
    starts = [v0] + [par.clip(v0 + cfg.jitter * rng.standard_normal(v0.size))
                     for _ in range(max(cfg.n_starts, 1) - 1)]
    best, iters = None, 0
    for v in starts:
        res = minimize(objective, v, method="Nelder-Mead",
                       options={"maxiter": cfg.max_iter, "xatol": 1e-7, "fatol": 1e-11,
                                "adaptive": v.size > 4})
        iters += int(res.nit)
        if best is None or res.fun < best.fun:
            best = res
    window_dates = (series.dates[s], series.dates[e - 1])
    v = par.clip(best.x)
    if best.fun >= 1e10:
        return CalibrationResult(None, math.inf, window_dates, False, iters, variant,
                                 "no finite likelihood found")
    model = _to_model(variant, v, cfg.fix_y)
    converged = bool(best.success)
    msg = str(best.message)
    if par.at_bound(v):
        converged, msg = False, "parameter at transform bound"
    return CalibrationResult(model, float(best.fun), window_dates, converged, iters, variant, msg)


def window_ends(n: int, window: int, step: int = 1) -> list[int]:
    """Exclusive end indices of rolling windows over ``n`` observations."""
    if n < window:
        raise DomainError("series shorter than window")
    return list(range(window, n + 1, step))


def rolling_calibrate(series: ReturnSeries, variant: str, window_weeks: int = 260, step: int = 1,
                      warm_start: bool = True, config: FitConfig | None = None,
                      threads: int = 1) -> list[CalibrationResult]:
    """One fit per window end; failures are recorded, not raised."""
    cfg = config or FitConfig()
    ends = window_ends(len(series), window_weeks, step)

    def cold(e):
        try:
            return mle_fit(series, variant, (e - window_weeks, e), None, cfg)
        except LevyIHRError as exc:
            return _failed(series, variant, e, window_weeks, exc)

    if not warm_start:
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as ex:
                return list(ex.map(cold, ends))
        return [cold(e) for e in ends]

    out, prev = [], None
    single = FitConfig(1, cfg.seed, cfg.fix_y, cfg.max_iter, cfg.jitter)
    for e in ends:
        win = (e - window_weeks, e)
        try:
            if prev is None:
                res = mle_fit(series, variant, win, None, cfg)
            else:
                res = mle_fit(series, variant, win, prev, single)
                check = mle_fit(series, variant, win, None, single)
                if check.neg_log_lik < res.neg_log_lik - 1e-6:
                    full = mle_fit(series, variant, win, None, cfg)
                    res = min((res, check, full), key=lambda r: r.neg_log_lik)
        except LevyIHRError as exc:
            res = _failed(series, variant, e, window_weeks, exc)
        if res.model is not None:
            prev = res.model
        out.append(res)
    return out


def _failed(series, variant, e, window, exc) -> CalibrationResult:
    return CalibrationResult(None, math.inf, (series.dates[e - window], series.dates[e - 1]),
                             False, 0, variant, f"{type(exc).__name__}: {exc}")


# ---------------------------------------------------------------------------
# CSV

def _fmt(x) -> str:
    return repr(float(x))


def write_calibration_csv(results: list[CalibrationResult], path, variant: str) -> None:
    names = param_names(variant)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["end_date", "variant", *names, "nll", "converged"])
        for r in results:
            if r.model is None:
                vals = [""] * len(names)
            else:
                pr = model_params(r.model)
                vals = [_fmt(pr[k]) for k in names]
            w.writerow([r.window[1].isoformat(), variant, *vals, _fmt(r.neg_log_lik),
                        "true" if r.converged else "false"])


def read_calibration_csv(path) -> list[tuple[str, ModelSpec | None]]:
    """Rows of ``(end_date, model)``; rows with missing parameters give ``None``."""
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for lineno, row in enumerate(reader, start=2):
            try:
                variant = row["variant"]
                names = param_names(variant)
                if any(not row[k] for k in names):
                    out.append((row["end_date"], None))
                    continue
                out.append((row["end_date"], model_from_params(variant, {k: row[k] for k in names})))
            except (KeyError, ValueError, LevyIHRError) as exc:
                raise ParseError(str(exc), lineno) from exc
    return out
