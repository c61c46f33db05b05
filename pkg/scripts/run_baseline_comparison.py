"""Standard MA configurations against NSGA-II and SPEA2.

    python scripts/run_baseline_comparison.py --quick --out results/compare

Extra arguments are passed to ``epochma compare``; without ``--algo`` the
standard lineup is used.
"""

import sys

from epochma.cli import main as cli_main


def main(argv):
    args = list(argv)
    if "--out" not in args:
        args += ["--out", "results/compare"]
    return cli_main(["compare"] + args)


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
