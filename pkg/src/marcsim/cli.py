"""Command-line experiment runner.

Configuration comes from an optional key=value file plus flags; flags win.
Exit codes: 0 success, 1 invalid spec, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import sys

from .experiment import (
    ExperimentSpec,
    SpecValidationError,
    run_experiment,
    spec_from_text,
    validate_spec,
)
from .model import Scheme


def _parse_snr(raw: str) -> list[float]:
    """Either a comma list ("0,5,10") or a range "start:stop:step" (inclusive)."""
    if ":" in raw:
        start, stop, step = (float(tok) for tok in raw.split(":"))
        if step <= 0:
            raise ValueError("snr range step must be positive")
        out = []
        k = 0
        while True:
            v = start + k * step
            if v > stop + 1e-12:
                break
            out.append(v)
            k += 1
        return out
    return [float(tok) for tok in raw.split(",") if tok]


def _parse_schemes(raw: str) -> list[Scheme]:
    return [Scheme(tok.strip()) for tok in raw.split(",") if tok.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="marcsim",
        description="Relay-selection sweeps for the two-source multiple-access "
        "relay channel; writes one CSV plus a metadata sidecar.",
    )
    p.add_argument("--config", help="key=value spec file; flags override it")
    p.add_argument("--figure", help="fig2 | fig3 | fig4 | fig5 | custom")
    p.add_argument("--scheme", help="comma list: anc,df")
    p.add_argument("--relays", help="comma list of relay counts, e.g. 1,2,5,10")
    p.add_argument("--snr", help='comma list in dB, or "start:stop:step"')
    p.add_argument("--mod", help="comma list of PSK orders, e.g. 2,8")
    p.add_argument("--trials", type=int, help="Monte Carlo trials per cell")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--gamma-th", type=float, dest="gamma_th", help="outage threshold")
    p.add_argument("--ptotal", type=float, help="fixed total power budget (replaces the SNR sweep)")
    p.add_argument("--out", help="output CSV path")
    p.add_argument("--workers", type=int, default=1, help="parallel cell workers")
    return p


def _spec_from_args(args: argparse.Namespace) -> ExperimentSpec:
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            spec = spec_from_text(fh.read())
    else:
        spec = ExperimentSpec()
    if args.figure is not None:
        spec.figure = args.figure
    if args.scheme is not None:
        spec.schemes = _parse_schemes(args.scheme)
    if args.relays is not None:
        spec.relay_counts = [int(tok) for tok in args.relays.split(",") if tok]
    if args.snr is not None:
        spec.snr_points_db = _parse_snr(args.snr)
    if args.mod is not None:
        spec.mod_orders = [int(tok) for tok in args.mod.split(",") if tok]
    if args.trials is not None:
        spec.trials = args.trials
    if args.seed is not None:
        spec.seed = args.seed
    if args.gamma_th is not None:
        spec.gamma_th = args.gamma_th
    if args.ptotal is not None:
        spec.p_total = args.ptotal
    if args.out is not None:
        spec.output_path = args.out
    return spec


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = _spec_from_args(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    result = validate_spec(spec)
    if not result.ok:
        for err in result.errors:
            print(f"invalid spec: {err}", file=sys.stderr)
        return 1
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)

    try:
        out = run_experiment(result.spec, workers=max(1, args.workers))
    except SpecValidationError as exc:
        for err in exc.errors:
            print(f"invalid spec: {err}", file=sys.stderr)
        return 1
    except Exception as exc:  # CLI boundary: report and exit 2
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {len(out.rows)} rows to {out.csv_path} (sidecar {out.meta_path})")
    return 0


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
