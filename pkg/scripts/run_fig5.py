#!/usr/bin/env python3
"""ANC SER with optimized vs equal power split, N = 1..4."""

import argparse

from marcsim.cli import main

if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default="results/fig5.csv")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    a = p.parse_args()
    argv = ["--figure", "fig5", "--out", a.out, "--workers", str(a.workers)]
    if a.trials is not None:
        argv += ["--trials", str(a.trials)]
    if a.seed is not None:
        argv += ["--seed", str(a.seed)]
    raise SystemExit(main(argv))
