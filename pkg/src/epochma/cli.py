"""Command line entry point: ``epochma {run,sweep,compare,indicators}``."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from epochma import harness, indicators, outputs
from epochma.config import build_settings, load_config

OVERRIDABLE = ("prices", "delimiter", "risk_free", "pop", "budget", "ma_budget", "k", "px", "pm",
               "pls", "pem", "ig", "fg", "theta", "ls_budget", "ls_share", "runs", "seed", "workers", "out")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="key = value settings file")
    p.add_argument("--prices", help="CSV of monthly closing prices (default: bundled synthetic set)")
    p.add_argument("--delimiter", help="CSV delimiter of the price file")
    p.add_argument("--risk-free", dest="risk_free", type=float, help="risk-free rate per period")
    p.add_argument("--pop", type=int, help="population size")
    p.add_argument("--budget", type=int, help="evaluation budget of the baselines")
    p.add_argument("--ma-budget", dest="ma_budget", type=int, help="evaluation budget of the MA (default 90%% of --budget)")
    p.add_argument("--k", type=int, help="cardinality bound")
    p.add_argument("--px", type=float, help="crossover rate")
    p.add_argument("--pm", type=float, help="per-gene mutation rate")
    p.add_argument("--pls", type=float, help="local search probability")
    p.add_argument("--pem", type=float, help="elite memory correction probability")
    p.add_argument("--ig", type=int, help="first generation of the intensification window")
    p.add_argument("--fg", type=int, help="generation at which the window closes")
    p.add_argument("--theta", type=int, help="elite memory capacity")
    p.add_argument("--ls-budget", dest="ls_budget", type=int, help="evaluations per local search call")
    p.add_argument("--ls-share", dest="ls_share", type=float,
                   help="LS evaluations per active generation as a fraction of the population")
    p.add_argument("--runs", type=int, help="independent runs per configuration")
    p.add_argument("--seed", type=int, help="seed of run 0; run i uses seed + i")
    p.add_argument("--out", help="output directory")
    p.add_argument("--workers", type=int, help="parallel worker processes")
    p.add_argument("--quick", action="store_true", help="desk scale: 10 runs, population 100, budget 5000")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="epochma", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="repeated runs of one algorithm")
    _common(run)
    run.add_argument("--algo", default="ma", help="ibea | nsga2 | spea2 | ma | ma:PLS,PEM,IG,FG")

    sw = sub.add_parser("sweep", help="grid over the intensification window")
    _common(sw)
    sw.add_argument("--cells", help="comma list of IG-FG pairs, e.g. 0-10,20-30 (default: full grid)")
    sw.add_argument("--step", type=int, default=10, help="grid spacing in generations")

    cmp_ = sub.add_parser("compare", help="MA configurations against the baselines")
    _common(cmp_)
    cmp_.add_argument("--algo", action="append",
                      help="repeatable; ibea | nsga2 | spea2 | ma | ma:PLS,PEM,IG,FG (default: standard lineup)")

    ind = sub.add_parser("indicators", help="recompute indicators from front CSV files")
    ind.add_argument("fronts", nargs="+", help="front CSV files (risk,ret[,sharpe])")
    ind.add_argument("--risk-free", dest="risk_free", type=float, default=0.0)
    ind.add_argument("--out", help="write the table to this CSV instead of stdout")
    return parser


def settings_from_args(args):
    file_values = load_config(args.config) if args.config else None
    overrides = {k: getattr(args, k, None) for k in OVERRIDABLE}
    return build_settings(args.quick, file_values, overrides)


def _sweep_cells(args, settings):
    if args.pls is not None or args.pem is not None:
        blocks = ((settings.pls, settings.pem),)
    else:
        blocks = harness.OPERATOR_BLOCKS
    if args.cells:
        pairs = []
        for tok in args.cells.split(","):
            ig, fg = tok.split("-")
            pairs.append((int(ig), int(fg)))
        return [(pls, pem, ig, fg) for pls, pem in blocks for ig, fg in pairs]
    return harness.window_grid(settings.horizon, args.step, blocks)


def _report(rows, out_dir):
    for row in rows:
        if row.error:
            print(f"{row.spec.label:<24} ABORTED {row.error}")
            continue
        parts = [f"{m}={row.summaries[m].median:.6g}{row.summaries[m].mark}" for m in harness.METRICS]
        print(f"{row.block + ' ' if row.block else ''}{row.spec.label:<24} " + "  ".join(parts))
    print(f"outputs written to {out_dir}")


def cmd_indicators(args) -> int:
    fronts = [indicators.read_front(p) for p in args.fronts]
    ctx_front = indicators.combine_fronts(fronts)
    ref = indicators.reference_point(ctx_front)
    records = []
    for path, f in zip(args.fronts, fronts):
        s = indicators.front_sharpes(f, args.risk_free)
        records.append({
            "front": path,
            "points": len(f),
            "sharpe_best": f"{s.max():.6g}" if len(f) else "",
            "hv": f"{indicators.hypervolume(f, ref):.6g}",
            "gd": f"{indicators.generational_distance(f, ctx_front):.6g}" if len(f) else "",
            "clipped": indicators.outside_reference(f, ref),
        })
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.DictWriter(fh, fieldnames=list(records[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(records)
    finally:
        if args.out:
            fh.close()
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "indicators":
        return cmd_indicators(args)

    settings = settings_from_args(args)
    if args.command == "run":
        rows, ctx = harness.compare([harness.parse_algo(args.algo, settings)], settings.workers)
    elif args.command == "sweep":
        rows, ctx = harness.sweep(settings, _sweep_cells(args, settings), settings.workers)
    else:
        specs = ([harness.parse_algo(a, settings) for a in args.algo] if args.algo
                 else harness.default_lineup(settings))
        rows, ctx = harness.compare(specs, settings.workers)
    out_dir = outputs.emit_outputs(Path(settings.out), rows, ctx, settings.risk_free)
    _report(rows, out_dir)
    return 0 if not any(r.error for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
