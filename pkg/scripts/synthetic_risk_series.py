"""End-to-end run on synthetic weekly prices: calibrate, then risk and contributions.

Usage: python3 scripts/synthetic_risk_series.py OUTDIR [--weeks 300] [--window 260] [--step 10]
"""
import argparse
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

from conftest import write_synthetic_prices  # noqa: E402
from levy_ihr import kou  # noqa: E402
from levy_ihr.cli import main  # noqa: E402


def run() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("outdir")
    ap.add_argument("--weeks", type=int, default=300)
    ap.add_argument("--window", type=int, default=260)
    ap.add_argument("--step", type=int, default=10)
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    truth = kou(0.05, 0.10, 10.0, 0.3, 20.0, 12.0)
    prices = write_synthetic_prices(out / "prices.csv", truth, args.weeks, seed=args.seed)
    common = ["--output-dir", str(out), "--seed", str(args.seed)]
    rc = main(["calibrate", "--model", "kou", "--input", str(prices), "--window", str(args.window),
               "--step", str(args.step), *common])
    if rc == 1:
        return rc
    cal = str(out / "calibration_kou.csv")
    rc = max(rc, main(["risk", "--input", cal, "--svg", *common]))
    rc = max(rc, main(["contrib", "--input", cal, "--svg", *common]))
    print((out / "risk.csv").read_text())
    return rc


if __name__ == "__main__":
    sys.exit(run())
