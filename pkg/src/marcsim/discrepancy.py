"""Measured gaps between closed-form shortcuts and their numeric oracles.

Three closed forms in this package are kept verbatim for documentation but
are never trusted as ground truth: the shared-pole MGF variant, the additive
SER closed form, and the cube-root power-allocation formula.  Each collector
here evaluates one of them against its oracle and returns the measured
magnitude, so every run states explicitly how far the shortcut sits from the
truth instead of silently substituting it.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .analytic import (
    BestRelayDistribution,
    SerParams,
    best_mgf,
    ser_closed_form,
)
from .power import (
    closed_form_source_power,
    make_split_objective,
    numeric_allocation,
)
from .model import Scheme

__all__ = [
    "DiscrepancyRecord",
    "mgf_pole_discrepancy",
    "additive_ser_discrepancy",
    "allocation_discrepancy",
    "collect_all",
]


@dataclasses.dataclass(frozen=True)
class DiscrepancyRecord:
    """One closed form measured against its oracle."""

    name: str
    printed: float
    oracle: float
    magnitude: float
    note: str

    def as_kv(self) -> str:
        return (
            f"discrepancy.{self.name}=printed:{self.printed!r}"
            f",oracle:{self.oracle!r},magnitude:{self.magnitude!r},note:{self.note}"
        )


def mgf_pole_discrepancy(num_relays: int = 2, eta: float = 1.0) -> DiscrepancyRecord:
    """Shared-pole MGF variant vs the per-term-pole form (the one that
    integrates the density correctly).  Reported at s = 0, where a valid MGF
    must equal 1 and the shared-pole variant collapses to 0 for N >= 2."""
    dist = BestRelayDistribution(num_relays, eta)
    printed = best_mgf(dist, 0.0, per_term_pole=False)
    oracle = best_mgf(dist, 0.0)
    s_grid = np.linspace(0.0, 10.0, 41)
    sup = float(
        np.max(
            np.abs(
                best_mgf(dist, s_grid, per_term_pole=False) - best_mgf(dist, s_grid)
            )
        )
    )
    return DiscrepancyRecord(
        "mgf_shared_pole",
        printed,
        oracle,
        sup,
        f"sup over s in [0,10] at N={num_relays}; shared-pole value at s=0 is {printed!r}",
    )


def additive_ser_discrepancy(
    num_relays: int = 2, eta_relay: float = 1.0, eta_direct: float = 0.5
) -> DiscrepancyRecord:
    """Additive closed-form SER vs the quadrature of the MGF product."""
    dist = BestRelayDistribution(num_relays, eta_relay)
    params = SerParams.from_rates(2, eta_relay, eta_direct)
    res = ser_closed_form(dist, params)
    return DiscrepancyRecord(
        "ser_additive_closed_form",
        res.value,
        res.quadrature,
        res.discrepancy,
        f"N={num_relays}, eta_relay={eta_relay}, eta_direct={eta_direct}",
    )


def allocation_discrepancy(
    p_total: float = 3.0, b: float = 1.0, num_relays: int = 2
) -> DiscrepancyRecord:
    """Cube-root allocation formula vs the golden-section numeric optimum."""
    raw = closed_form_source_power(p_total, b)
    objective = make_split_objective(num_relays=num_relays, scheme=Scheme.ANC)
    opt = numeric_allocation(p_total, objective)
    feasible = 0.0 < raw < p_total / 2.0
    note = f"p_total={p_total}, b={b}; formula feasible: {feasible}"
    if not feasible:
        note += " (raw value outside (0, p_total/2))"
    return DiscrepancyRecord(
        "power_allocation_closed_form",
        raw,
        opt.p_source,
        abs(raw - opt.p_source),
        note,
    )


def collect_all() -> list[DiscrepancyRecord]:
    """All three records at reference parameters."""
    return [
        mgf_pole_discrepancy(),
        additive_ser_discrepancy(),
        allocation_discrepancy(),
    ]
