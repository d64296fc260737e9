"""Command-line interface: ``levy-ihr {calibrate,risk,contrib,oracle}``.

Exit codes: 0 success, 1 fatal error, 2 partial failure (some windows or
dates failed). Set ``LEVY_IHR_LOG`` to a logging level name for diagnostics.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

from . import calibration as cal
from .errors import LevyIHRError
from .hejd import Direction
from .montecarlo import McConfig, simulate_fpp
from .models import Scenario, ScenarioKind, model_from_dict, model_to_dict
from .risk import CLUSTER_SIZES, RiskQuery, risk_report
from .svg import line_chart

log = logging.getLogger("levy_ihr")

EXIT_OK, EXIT_FATAL, EXIT_PARTIAL = 0, 1, 2
TRADING_DAYS = 252

RISK_COLUMNS = ("date", "model", "alpha", "T", "ivar", "ies", "pit_var", "pit_es", "omega",
                "contrib_ivar_diffusion", "contrib_ivar_jump",
                "contrib_integral_diffusion", "contrib_integral_jump",
                "contrib_ies_diffusion", "contrib_ies_jump",
                "ivar_pit_ratio", "ies_pit_ratio")
CONTRIB_COLUMNS = ("date", "model", "alpha", "T", "omega",
                   "contrib_ies_diffusion", "contrib_ies_jump",
                   *(f"contrib_ies_top{k}" for k in CLUSTER_SIZES),
                   "mean_loss_jump_size")


def _fmt(x) -> str:
    return repr(float(x))


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="levy-ihr", description="Intra-horizon risk for Lévy models")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--output-dir", default=".")

    c = sub.add_parser("calibrate", help="rolling-window MLE calibration")
    common(c)
    c.add_argument("--model", required=True, choices=cal.VARIANTS)
    c.add_argument("--input", required=True, help="CSV with header date,price")
    c.add_argument("--window", type=int, default=260)
    c.add_argument("--step", type=int, default=1)
    c.add_argument("--frequency", default="weekly", choices=sorted(cal.FREQUENCY_DT))
    c.add_argument("--n-starts", type=int, default=5)
    c.add_argument("--max-iter", type=int, default=3000)
    c.add_argument("--fix-y", type=float, default=0.5)
    c.add_argument("--no-warm-start", action="store_true")

    for name, helptext in (("risk", "iVaR, iES and point-in-time risk"),
                           ("contrib", "diffusion/jump risk contributions")):
        r = sub.add_parser(name, help=helptext)
        common(r)
        src = r.add_mutually_exclusive_group(required=True)
        src.add_argument("--input", help="calibration CSV produced by 'calibrate'")
        src.add_argument("--params", help="model JSON document or path to one")
        r.add_argument("--model", default=None, help="label for the model column")
        r.add_argument("--alpha", type=float, default=0.01)
        r.add_argument("--horizon-days", type=float, default=10.0)
        r.add_argument("--scenario", choices=[k.value for k in ScenarioKind], default="long")
        r.add_argument("--z", type=float, default=0.0, help="initial P&L")
        r.add_argument("--z2", type=float, default=1.0, help="position constant")
        r.add_argument("--n-exp", type=int, default=100, help="exponentials per side for VG/CGMY")
        r.add_argument("--gs-order", type=int, default=8)
        r.add_argument("--svg", action="store_true", help="also write an SVG chart")

    o = sub.add_parser("oracle", help="Monte Carlo first-passage fixture")
    common(o)
    o.add_argument("--params", required=True, help="model JSON document or path to one")
    o.add_argument("--x", type=float, default=0.0)
    o.add_argument("--ell", type=float, required=True)
    o.add_argument("--direction", choices=[d.value for d in Direction], default="down")
    o.add_argument("--horizon-days", type=float, default=None)
    o.add_argument("--horizon", type=float, default=1.0, help="years (ignored with --horizon-days)")
    o.add_argument("--n-paths", type=int, default=1_000_000)
    o.add_argument("--no-bridge", action="store_true")
    return p


def _load_params(text: str):
    path = Path(text)
    if not text.lstrip().startswith("{") and path.exists():
        text = path.read_text()
    return model_from_dict(json.loads(text))


def _outdir(args) -> Path:
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_calibrate(args) -> int:
    try:
        series = cal.ingest_prices(args.input, args.frequency)
    except FileNotFoundError:
        log.error("input file not found: %s", args.input)
        return EXIT_FATAL
    except (LevyIHRError, OSError) as exc:
        log.error("cannot read %s: %s", args.input, exc)
        return EXIT_FATAL
    cfg = cal.FitConfig(args.n_starts, args.seed, args.fix_y, args.max_iter)
    try:
        results = cal.rolling_calibrate(series, args.model, args.window, args.step,
                                        not args.no_warm_start, cfg, args.threads)
    except LevyIHRError as exc:
        log.error("calibration failed: %s", exc)
        return EXIT_FATAL
    out = _outdir(args) / f"calibration_{args.model}.csv"
    cal.write_calibration_csv(results, out, args.model)
    failed = sum(r.model is None for r in results)
    log.info("wrote %d windows to %s (%d failed)", len(results), out, failed)
    return EXIT_PARTIAL if failed else EXIT_OK


def _risk_inputs(args):
    if args.params:
        model = _load_params(args.params)
        return [("", model)]
    return cal.read_calibration_csv(args.input)


def _scenario(args) -> Scenario:
    kind = ScenarioKind(args.scenario)
    return Scenario(kind, args.z, 0.0 if kind is ScenarioKind.DIRECT else args.z2)


def _reports(args):
    rows = _risk_inputs(args)
    sc = _scenario(args)
    T = args.horizon_days / TRADING_DAYS
    reports, failed = [], 0
    for date, model in rows:
        if model is None:
            failed += 1
            log.warning("skipping %s: no parameters", date)
            continue
        label = args.model or model_to_dict(model)["variant"]
        try:
            q = RiskQuery(model, sc, args.alpha, T, args.gs_order, args.n_exp, args.n_exp)
            reports.append(risk_report(q, date, label))
        except (LevyIHRError, ValueError, ArithmeticError) as exc:
            failed += 1
            log.warning("risk computation failed for %s: %s", date or label, exc)
    return reports, failed


def _risk_row(r) -> list:
    return [r.date, r.model_name, _fmt(r.alpha), _fmt(r.horizon), _fmt(r.ivar), _fmt(r.ies),
            _fmt(r.pit_var), _fmt(r.pit_es), _fmt(r.omega),
            _fmt(r.contrib_ivar.diffusion), _fmt(r.contrib_ivar.jump_total),
            _fmt(r.contrib_integral.diffusion), _fmt(r.contrib_integral.jump_total),
            _fmt(r.contrib_ies.diffusion), _fmt(r.contrib_ies.jump_total),
            _fmt(r.ivar / r.pit_var), _fmt(r.ies / r.pit_es)]


def _contrib_row(r) -> list:
    return [r.date, r.model_name, _fmt(r.alpha), _fmt(r.horizon), _fmt(r.omega),
            _fmt(r.contrib_ies.diffusion), _fmt(r.contrib_ies.jump_total),
            *(_fmt(r.jump_cluster_contrib[k]) for k in CLUSTER_SIZES),
            _fmt(r.mean_loss_jump_size)]


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _run_report(args, stem: str, header, row_fn, chart) -> int:
    try:
        reports, failed = _reports(args)
    except FileNotFoundError as exc:
        log.error("input not found: %s", exc)
        return EXIT_FATAL
    except (LevyIHRError, ValueError, KeyError, OSError) as exc:
        log.error("invalid input: %s", exc)
        return EXIT_FATAL
    if not reports:
        log.error("no risk rows could be computed")
        return EXIT_FATAL
    out = _outdir(args)
    _write_csv(out / f"{stem}.csv", header, [row_fn(r) for r in reports])
    if args.svg:
        (out / f"{stem}.svg").write_text(chart(reports))
    return EXIT_PARTIAL if failed else EXIT_OK


def cmd_risk(args) -> int:
    chart = lambda rs: line_chart({"iVaR": [r.ivar for r in rs], "iES": [r.ies for r in rs],
                                   "pit VaR": [r.pit_var for r in rs], "pit ES": [r.pit_es for r in rs]},
                                  "intra-horizon vs point-in-time risk")
    return _run_report(args, "risk", RISK_COLUMNS, _risk_row, chart)


def cmd_contrib(args) -> int:
    chart = lambda rs: line_chart({f"top {k}": [r.jump_cluster_contrib[k] for r in rs]
                                   for k in CLUSTER_SIZES} | {"jump": [r.contrib_ies.jump_total for r in rs]},
                                  "iES jump contributions")
    return _run_report(args, "contrib", CONTRIB_COLUMNS, _contrib_row, chart)


def cmd_oracle(args) -> int:
    try:
        model = _load_params(args.params)
        horizon = args.horizon_days / TRADING_DAYS if args.horizon_days else args.horizon
        cfg = McConfig(n_paths=args.n_paths, seed=args.seed, bridge_correction=not args.no_bridge,
                       horizon=horizon, threads=args.threads)
        res = simulate_fpp(model, args.x, args.ell, args.direction, cfg)
    except (LevyIHRError, ValueError, TypeError, KeyError, OSError) as exc:
        log.error("invalid oracle parameters: %s", exc)
        return EXIT_FATAL
    doc = {"model": model_to_dict(model), "x": args.x, "ell": args.ell, "direction": args.direction,
           "horizon": horizon, "n_paths": args.n_paths, "seed": args.seed,
           "bridge_correction": not args.no_bridge,
           "p_hat": res.p_hat, "stderr": res.stderr,
           "components": {"diffusion": res.p_diffusion_hat, "diffusion_stderr": res.stderr_diffusion,
                          "jump_by_type": res.p_jump_by_type_hat,
                          "jump_by_type_stderr": res.stderr_jump_by_type}}
    out = _outdir(args) / "oracle.json"
    out.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


COMMANDS = {"calibrate": cmd_calibrate, "risk": cmd_risk, "contrib": cmd_contrib, "oracle": cmd_oracle}


def main(argv=None) -> int:
    level = os.environ.get("LEVY_IHR_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    args = _build_parser().parse_args(argv)
    return COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
