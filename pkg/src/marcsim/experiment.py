"""Experiment runner: sweeps of the four standard curve families, written as
CSV with a metadata sidecar.

One fixed schema serves every figure:

    scheme,mod_order,num_relays,snr_db,ser_mc,ser_ci,ser_quadrature,
    ser_paper_closed,outage_mc,outage_analytic,p_s,p_r,flags

Inapplicable cells stay empty.  Rows are keyed by their sweep cell and
journaled as they complete, so an interrupted sweep resumes where it stopped;
the final CSV is always written in deterministic cell order with shortest
round-trip float formatting, making runs byte-identical for a given spec and
seed regardless of worker count.
"""

from __future__ import annotations

import concurrent.futures
import dataclasses
import hashlib
import math
import os
import sys

import numpy as np

from . import discrepancy
from .analytic import (
    BestRelayDistribution,
    SerParams,
    UnsupportedModulationError,
    best_cdf,
    ser_closed_form,
    ser_quadrature,
)
from .model import (
    Scheme,
    SystemConfig,
    bottleneck_rate,
    compute_rate_params,
    config_at_snr_db,
)
from .montecarlo import estimate_outage, estimate_ser
from .power import PowerSplit, make_split_objective, numeric_allocation

__all__ = [
    "CSV_HEADER",
    "FIGURES",
    "ExperimentSpec",
    "ValidationResult",
    "SpecValidationError",
    "validate_spec",
    "spec_to_text",
    "spec_from_text",
    "run_experiment",
]

CSV_HEADER = (
    "scheme,mod_order,num_relays,snr_db,ser_mc,ser_ci,ser_quadrature,"
    "ser_paper_closed,outage_mc,outage_analytic,p_s,p_r,flags"
)

FIGURES = ("fig2_ser_vs_snr_mpsk", "fig3_anc_vs_df", "fig4_outage", "fig5_power_alloc", "custom")

# short aliases accepted on the command line
_FIGURE_ALIASES = {
    "fig2": "fig2_ser_vs_snr_mpsk",
    "fig3": "fig3_anc_vs_df",
    "fig4": "fig4_outage",
    "fig5": "fig5_power_alloc",
}

_FIGURE_GRIDS = {
    "fig2_ser_vs_snr_mpsk": ([Scheme.ANC], [2, 8], [1, 2, 3, 4, 5]),
    "fig3_anc_vs_df": ([Scheme.ANC, Scheme.DF_NC], [2], [1, 2, 5, 10]),
    "fig4_outage": ([Scheme.ANC, Scheme.DF_NC], [2], [1, 2, 5, 10]),
    "fig5_power_alloc": ([Scheme.ANC], [2], [1, 2, 3, 4]),
    "custom": ([Scheme.ANC], [2], [1]),
}

_DEFAULT_SNR_DB = [2.5 * k for k in range(11)]  # 0..25 dB
_DEFAULT_TRIALS = 10**6
_DEFAULT_SEED = 42
_DEFAULT_GAMMA_TH = 1.0
_TRIALS_RUNTIME_WARNING = 10**8


@dataclasses.dataclass
class ExperimentSpec:
    """Declarative description of one sweep; None fields take documented
    defaults in validate_spec."""

    figure: str = "custom"
    snr_points_db: list[float] | None = None
    relay_counts: list[int] | None = None
    trials: int | None = None
    seed: int | None = None
    schemes: list[Scheme] | None = None
    mod_orders: list[int] | None = None
    gamma_th: float | None = None
    p_total: float | None = None
    output_path: str | None = None


@dataclasses.dataclass
class ValidationResult:
    spec: ExperimentSpec
    errors: list[str]
    warnings: list[str]

    @property
    def ok(self) -> bool:
        return not self.errors


class SpecValidationError(ValueError):
    def __init__(self, errors: list[str]):
        self.errors = errors
        super().__init__("invalid experiment spec: " + "; ".join(errors))


def validate_spec(spec: ExperimentSpec) -> ValidationResult:
    """Fill defaults and collect every violation (never raises)."""
    errors: list[str] = []
    warnings: list[str] = []
    s = dataclasses.replace(spec)

    s.figure = _FIGURE_ALIASES.get(s.figure, s.figure)
    if s.figure not in FIGURES:
        errors.append(f"figure: unknown value {s.figure!r}, expected one of {FIGURES}")
        return ValidationResult(s, errors, warnings)

    grid_schemes, grid_mods, grid_relays = _FIGURE_GRIDS[s.figure]
    if s.schemes is None:
        s.schemes = list(grid_schemes)
    if s.mod_orders is None:
        s.mod_orders = list(grid_mods)
    if s.relay_counts is None:
        s.relay_counts = list(grid_relays)
    if s.trials is None:
        s.trials = _DEFAULT_TRIALS
    if s.seed is None:
        s.seed = _DEFAULT_SEED
    if s.gamma_th is None:
        s.gamma_th = _DEFAULT_GAMMA_TH
    if s.output_path is None:
        s.output_path = f"results/{s.figure}.csv"
    if s.p_total is not None:
        if s.p_total <= 0:
            errors.append(f"p_total: must be positive, got {s.p_total!r}")
        else:
            # a fixed budget replaces the SNR sweep by its single equivalent
            s.snr_points_db = [10.0 * math.log10(s.p_total)]
    if s.snr_points_db is None:
        s.snr_points_db = list(_DEFAULT_SNR_DB)

    if not s.snr_points_db:
        errors.append("snr_points_db: must be nonempty")
    elif any(b <= a for a, b in zip(s.snr_points_db, s.snr_points_db[1:])):
        errors.append("snr_points_db: must be strictly increasing")
    if not s.relay_counts:
        errors.append("relay_counts: must be nonempty")
    else:
        for n in s.relay_counts:
            if not isinstance(n, int) or n < 1:
                errors.append(f"relay_counts: entries must be integers >= 1, got {n!r}")
                break
    if not s.mod_orders:
        errors.append("mod_orders: must be nonempty")
    else:
        for m in s.mod_orders:
            if not isinstance(m, int) or m < 2 or (m & (m - 1)) != 0:
                errors.append(f"mod_orders: entries must be powers of two >= 2, got {m!r}")
                break
    if not s.schemes:
        errors.append("schemes: must be nonempty")
    if not isinstance(s.trials, int) or s.trials < 1:
        errors.append(f"trials: must be an integer >= 1, got {s.trials!r}")
    elif s.trials > _TRIALS_RUNTIME_WARNING:
        warnings.append(f"trials: {s.trials} will take a very long time per cell")
    if not isinstance(s.seed, int) or s.seed < 0:
        errors.append(f"seed: must be a nonnegative integer, got {s.seed!r}")
    if s.gamma_th < 0:
        errors.append(f"gamma_th: must be nonnegative, got {s.gamma_th!r}")
    if not s.output_path:
        errors.append("output_path: must be nonempty")

    return ValidationResult(s, errors, warnings)


# -- plain-text serialization (key=value per line) --------------------------


def spec_to_text(spec: ExperimentSpec) -> str:
    def fmt(v):
        if v is None:
            return ""
        if isinstance(v, list):
            return ",".join(fmt(x) for x in v)
        if isinstance(v, Scheme):
            return v.value
        if isinstance(v, float):
            return repr(v)
        return str(v)

    lines = [f"{f.name}={fmt(getattr(spec, f.name))}" for f in dataclasses.fields(spec)]
    return "\n".join(lines) + "\n"


def _parse_list(raw: str, parse):
    return [parse(tok) for tok in raw.split(",") if tok != ""]


def spec_from_text(text: str) -> ExperimentSpec:
    spec = ExperimentSpec()
    parsers = {
        "figure": str,
        "snr_points_db": lambda r: _parse_list(r, float),
        "relay_counts": lambda r: _parse_list(r, int),
        "trials": int,
        "seed": int,
        "schemes": lambda r: _parse_list(r, Scheme),
        "mod_orders": lambda r: _parse_list(r, int),
        "gamma_th": float,
        "p_total": float,
        "output_path": str,
    }
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {line!r}")
        key, _, raw = line.partition("=")
        key = key.strip()
        if key not in parsers:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        setattr(spec, key, parsers[key](raw.strip()) if raw.strip() else None)
    if spec.figure is None:
        spec.figure = "custom"
    return spec


# -- sweep cells -------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class _Cell:
    scheme: Scheme
    mod_order: int
    num_relays: int
    snr_db: float
    alloc: str  # "", "equal" or "optimized"
    kind: str   # "ser", "outage", "both" or "power"

    def key(self) -> str:
        return (
            f"scheme={self.scheme.value};m={self.mod_order};n={self.num_relays};"
            f"snr={self.snr_db!r};alloc={self.alloc}"
        )


def _cells(spec: ExperimentSpec) -> list[_Cell]:
    kind = {
        "fig2_ser_vs_snr_mpsk": "ser",
        "fig3_anc_vs_df": "ser",
        "fig4_outage": "outage",
        "fig5_power_alloc": "power",
        "custom": "both",
    }[spec.figure]
    cells = []
    for scheme in spec.schemes:
        for m in spec.mod_orders:
            for n in spec.relay_counts:
                for snr in spec.snr_points_db:
                    if kind == "power":
                        cells.append(_Cell(scheme, m, n, snr, "equal", kind))
                        cells.append(_Cell(scheme, m, n, snr, "optimized", kind))
                    else:
                        cells.append(_Cell(scheme, m, n, snr, "", kind))
    return cells


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(float(v))  # shortest round-trip; plain even for numpy scalars
    return str(v)


def _cell_powers(spec: ExperimentSpec, cell: _Cell) -> PowerSplit:
    p_total = 10.0 ** (cell.snr_db / 10.0)
    if cell.alloc == "optimized":
        objective = make_split_objective(
            num_relays=cell.num_relays, mod_order=cell.mod_order, scheme=cell.scheme
        )
        return numeric_allocation(p_total, objective)
    return PowerSplit.equal(p_total)


def _compute_cell(args) -> tuple[str, str]:
    spec, cell, seed_pair = args
    seed_ser, seed_out = int(seed_pair[0]), int(seed_pair[1])
    split = _cell_powers(spec, cell)
    config = SystemConfig(
        num_relays=cell.num_relays,
        p_source=split.p_source,
        p_relay=split.p_relay,
        mod_order=cell.mod_order,
        scheme=cell.scheme,
    )
    rates = compute_rate_params(config)
    dist = BestRelayDistribution(cell.num_relays, rates.eta_relay_path)
    params = SerParams.from_rates(cell.mod_order, rates.eta_relay_path, rates.eta_direct)

    ser_mc = ser_ci = ser_quad = ser_closed = outage_mc = outage_an = None
    flags = []
    if cell.alloc:
        flags.append(f"alloc={cell.alloc}")

    if cell.kind in ("ser", "both", "power"):
        est_s1, _ = estimate_ser(config, cell.snr_db, spec.trials, seed_ser)
        ser_mc, ser_ci = est_s1.ser, est_s1.ci_halfwidth
        ser_quad = ser_quadrature(dist, rates.eta_direct, params)
        try:
            ser_closed = ser_closed_form(dist, params).value
        except UnsupportedModulationError:
            ser_closed = None
        # the analytic chain is a single-user bound; the simulated joint
        # two-user detection sits above it
        flags.append("ser_model_gap")
        if cell.scheme is Scheme.DF_NC:
            flags.append("relay_mai")
    if cell.kind in ("outage", "both"):
        outage_mc = estimate_outage(config, cell.snr_db, spec.gamma_th, spec.trials, seed_out)
        bn = BestRelayDistribution(cell.num_relays, bottleneck_rate(config_at_snr_db(config, cell.snr_db)))
        outage_an = best_cdf(bn, spec.gamma_th)
        if cell.scheme is Scheme.ANC:
            flags.append("outage_exp_approx")

    row = ",".join(
        [
            cell.scheme.value,
            str(cell.mod_order),
            str(cell.num_relays),
            repr(float(cell.snr_db)),
            _fmt(ser_mc),
            _fmt(ser_ci),
            _fmt(ser_quad),
            _fmt(ser_closed),
            _fmt(outage_mc),
            _fmt(outage_an),
            _fmt(split.p_source),
            _fmt(split.p_relay),
            ";".join(flags),
        ]
    )
    return cell.key(), row


def _config_hash(spec: ExperimentSpec) -> str:
    return hashlib.sha256(spec_to_text(spec).encode()).hexdigest()[:16]


def _load_journal(path: str, config_hash: str) -> dict[str, str]:
    done: dict[str, str] = {}
    if not os.path.exists(path):
        return done
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline().rstrip("\n")
        if first != f"#config={config_hash}":
            return done  # different sweep; start over
        for line in fh:
            line = line.rstrip("\n")
            if "\t" not in line:
                continue  # torn write from an interrupted run
            key, _, row = line.partition("\t")
            if row.count(",") == CSV_HEADER.count(","):
                done[key] = row
    return done


@dataclasses.dataclass(frozen=True)
class ExperimentResult:
    csv_path: str
    meta_path: str
    rows: list[str]
    warnings: list[str]


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> ExperimentResult:
    """Run every sweep cell, journal rows as they complete, then write the
    CSV (deterministic order) and the metadata sidecar."""
    result = validate_spec(spec)
    if not result.ok:
        raise SpecValidationError(result.errors)
    spec = result.spec

    out_path = spec.output_path
    parent = os.path.dirname(out_path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    journal_path = out_path + ".journal"
    meta_path = out_path + ".meta"
    chash = _config_hash(spec)

    cells = _cells(spec)
    done = _load_journal(journal_path, chash)
    pending = [(i, c) for i, c in enumerate(cells) if c.key() not in done]

    mode = "a" if done else "w"
    with open(journal_path, mode, encoding="utf-8") as journal:
        if not done:
            journal.write(f"#config={chash}\n")
            journal.flush()

        def record(key: str, row: str) -> None:
            done[key] = row
            journal.write(f"{key}\t{row}\n")
            journal.flush()

        jobs = [
            (spec, cell, np.random.SeedSequence(spec.seed, spawn_key=(idx,)).generate_state(2))
            for idx, cell in pending
        ]
        if workers > 1 and len(jobs) > 1:
            with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
                for key, row in pool.map(_compute_cell, jobs):
                    record(key, row)
        else:
            for job in jobs:
                key, row = _compute_cell(job)
                record(key, row)

    rows = [done[c.key()] for c in cells]
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in rows:
            fh.write(row + "\n")

    _write_meta(meta_path, spec, chash)
    return ExperimentResult(out_path, meta_path, rows, result.warnings)


def _write_meta(path: str, spec: ExperimentSpec, chash: str) -> None:
    import scipy

    lines = [
        f"config_hash={chash}",
        f"figure={spec.figure}",
        f"seed={spec.seed}",
        f"trials={spec.trials}",
        f"gamma_th={spec.gamma_th!r}",
        "snr_axis=total_power_over_noise_db",
        "power_constraint=2*p_source+p_relay=p_total",
        "default_split=equal(p_source=p_relay=p_total/3)",
        "ser_column_source=source_1",
        "analytic_ser_rate=per_source_relay_path",
        "analytic_outage_rate=pair_min_bottleneck",
        f"python_version={sys.version.split()[0]}",
        f"numpy_version={np.__version__}",
        f"scipy_version={scipy.__version__}",
    ]
    for rec in discrepancy.collect_all():
        lines.append(rec.as_kv())
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
