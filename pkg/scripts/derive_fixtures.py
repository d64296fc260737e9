"""Recompute the frozen reference values used by the test suite and rewrite the golden fixture.

Usage: python3 scripts/derive_fixtures.py [--skip-fixture]
"""
import argparse
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

import oracles  # noqa: E402
from levy_ihr import Diffusion, Direction, McConfig, RiskQuery, Scenario, kou, simulate_fpp  # noqa: E402
from levy_ihr.cli import main  # noqa: E402
from levy_ihr.models import model_to_json  # noqa: E402
from levy_ihr.risk import fpp, ies, ivar  # noqa: E402

KOU = kou(0.0, 0.2, 3.0, 0.5, 50.0, 25.0)
T10 = 10 / 252


def main_() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--skip-fixture", action="store_true")
    args = ap.parse_args()

    print("Kou exponent at 1 (exact rational):", float(oracles.phi_exact(1, 0, 0.2, 3, [0.5], [50], [0.5], [25])))
    b, g = oracles.roots_brentq(0, 0.2, 3, [0.5], [50], [0.5], [25], 10.0)
    print("Kou roots at level 10:", b, g)
    print("Brownian passage 2*Phi(-1):", oracles.bm_passage(1, 1, 1))
    print("Brownian iVaR / iES oracle:", oracles.bm_ivar(0.05), oracles.bm_ies(0.05))
    print("Normal VaR / ES oracle:", oracles.normal_var_es(0.05))
    q = RiskQuery(Diffusion(0.0, 1.0), Scenario.direct(), 0.05, 1.0)
    print("engine iVaR / iES:", ivar(q), ies(q))

    print("\nengine vs simulation, Kou spec, T = 10 trading days")
    print(f"{'dist':>6} {'engine':>10} {'mc':>10} {'stderr':>9} {'eng diff':>10} {'mc diff':>10}")
    for dist in (0.02, 0.05, 0.10):
        mc = simulate_fpp(KOU, 0.0, -dist, Direction.DOWN, McConfig(n_paths=1_000_000, seed=7, horizon=T10))
        e = fpp(KOU, Scenario.direct(), "all", T10, -dist)
        d = fpp(KOU, Scenario.direct(), "diffusion", T10, -dist)
        print(f"{dist:6.2f} {e:10.6f} {mc.p_hat:10.6f} {mc.stderr:9.6f} {d:10.6f} {mc.p_diffusion_hat:10.6f}")

    if not args.skip_fixture:
        out = ROOT / "tests" / "fixtures"
        main(["oracle", "--params", model_to_json(KOU), "--x", "0", "--ell", "-0.05", "--horizon-days", "10",
              "--n-paths", "1000000", "--seed", "7", "--output-dir", str(out)])
        (out / "oracle.json").replace(out / "kou_oracle.json")
        print("\nwrote", out / "kou_oracle.json")


if __name__ == "__main__":
    main_()
