import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from levy_ihr import CGMY, VG, HyperExpSpec, kou  # noqa: E402
from levy_ihr.models import laplace_exponent  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"

# reference Kou spec used by the engine-vs-simulation checks
KOU_REF = kou(0.0, 0.2, 3.0, 0.5, 50.0, 25.0)


def martingale_kou(sigma, lam, p, xi, eta):
    base = kou(0.0, sigma, lam, p, xi, eta)
    return kou(-float(laplace_exponent(base, 1.0)), sigma, lam, p, xi, eta)


def martingale_levy(cls, *args):
    base = cls(*args, drift=0.0)
    return cls(*args, drift=-float(laplace_exponent(base, 1.0)))


# median calibrated parameters for an equity index and a commodity series
MEDIANS = {
    "kou_spx": martingale_kou(0.0623, 103.72, 0.32, 100.08, 77.00),
    "vg_spx": martingale_levy(VG, 71.21, 72.85, 105.41),
    "cgmy_spx": martingale_levy(CGMY, 5.23, 44.84, 77.05, 0.5),
    "kou_co1": martingale_kou(0.1983, 169.26, 0.12, 61.52, 64.10),
    "vg_co1": martingale_levy(VG, 136.42, 57.81, 68.88),
    "cgmy_co1": martingale_levy(CGMY, 14.77, 39.95, 55.36, 0.5),
}


@pytest.fixture
def kou_ref():
    return KOU_REF


def random_spec(rng, m, n, sigma=0.2, mu=0.05):
    """Hyper-exponential spec with ``m`` up and ``n`` down types at well-separated rates."""
    w = rng.dirichlet(np.ones(m + n))
    # sorted draws shifted apart so bracketing near poles stays well conditioned
    r_up = np.sort(rng.uniform(2.0, 120.0, m)) + np.arange(m) * 1.0
    r_down = np.sort(rng.uniform(2.0, 120.0, n)) + np.arange(n) * 1.0
    return HyperExpSpec(mu, sigma, float(rng.uniform(0.5, 50.0)), tuple(w[:m]), tuple(r_up),
                        tuple(w[m:]), tuple(r_down))


def synthetic_series(model, n_returns, dt=1 / 52, seed=2024, start=None):
    """Weekly log-return series simulated from ``model`` with a Philox stream."""
    import datetime as dt_

    from levy_ihr.calibration import ReturnSeries
    from levy_ihr.montecarlo import sample_increments
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed])))
    if isinstance(model, VG):
        # difference of two gamma variables
        x = (rng.gamma(model.C * dt, 1 / model.M, n_returns) - rng.gamma(model.C * dt, 1 / model.G, n_returns)
             + model.drift * dt)
    else:
        x = sample_increments(model, dt, n_returns, rng)
    start = start or dt_.date(1990, 1, 5)
    dates = tuple(start + dt_.timedelta(weeks=i + 1) for i in range(n_returns))
    return ReturnSeries(dates, x, dt)


def write_synthetic_prices(path, model, n_returns, seed=2024):
    from levy_ihr.calibration import write_prices_csv
    s = synthetic_series(model, n_returns, seed=seed)
    prices = 100.0 * np.exp(np.concatenate([[0.0], np.cumsum(s.log_returns)]))
    import datetime as dt_
    dates = [s.dates[0] - dt_.timedelta(weeks=1), *s.dates]
    write_prices_csv(path, dates, prices)
    return path
