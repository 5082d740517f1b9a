"""Run the exp1 preset sweep and write CSV, aggregates and plot data.

Extra arguments are forwarded to the CLI, e.g. ``--trials 50 --workers 4``.
"""

import sys

from coarray_esprit.harness.cli import main

if __name__ == "__main__":
    sys.exit(main(["exp1", "--emit-plot-data", "results/plot", *sys.argv[1:]]))
