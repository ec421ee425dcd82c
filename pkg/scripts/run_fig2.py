#!/usr/bin/env python3
"""SER vs SNR for BPSK and 8-PSK under ANC, N = 1..5 relays."""

import argparse

from marcsim.cli import main

if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default="results/fig2.csv")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    a = p.parse_args()
    argv = ["--figure", "fig2", "--out", a.out, "--workers", str(a.workers)]
    if a.trials is not None:
        argv += ["--trials", str(a.trials)]
    if a.seed is not None:
        argv += ["--seed", str(a.seed)]
    raise SystemExit(main(argv))
