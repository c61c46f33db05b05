"""Sensitivity sweep over the intensification window, printed as IG x FG matrices.

    python scripts/run_window_sweep.py --quick --out results/sweep
    python scripts/run_window_sweep.py --runs 30 --workers 8      # full scale

Extra arguments are passed to ``epochma sweep``.
"""

import csv
import sys
from pathlib import Path

from epochma.cli import main as cli_main


def matrices(summary_path, metric="sharpe"):
    rows = list(csv.DictReader(Path(summary_path).open(encoding="utf-8")))
    blocks = {}
    for r in rows:
        if r["error"]:
            continue
        blocks.setdefault(r["block"], {})[(int(r["ig"]), int(r["fg"]))] = (
            r[f"{metric}_median"], r[f"{metric}_mark"])
    for block, cells in blocks.items():
        igs = sorted({ig for ig, _ in cells})
        fgs = sorted({fg for _, fg in cells})
        print(f"\n{block}  median {metric}")
        print("IG\\FG " + "".join(f"{fg:>13}" for fg in fgs))
        for ig in igs:
            line = "".join(f"{cells[(ig, fg)][0] + cells[(ig, fg)][1]:>13}" if (ig, fg) in cells else " " * 13
                           for fg in fgs)
            print(f"{ig:>5} {line}")


def main(argv):
    args = list(argv)
    if "--out" not in args:
        args += ["--out", "results/sweep"]
    status = cli_main(["sweep"] + args)
    matrices(Path(args[args.index("--out") + 1]) / "summary.csv")
    return status


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
