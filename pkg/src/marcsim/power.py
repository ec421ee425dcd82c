"""SER-minimizing split of a total power budget between the two sources and
the selected relay.

The authoritative allocation is numeric: a coarse grid scan followed by
golden-section refinement of the quadrature SER.  The cube-root closed form
is evaluated as written for documentation and discrepancy reporting; at
typical parameters it lands far outside the feasible source-power range.
"""

from __future__ import annotations

import dataclasses
import math
import warnings
from typing import Callable

import numpy as np

from .analytic import BestRelayDistribution, SerParams, ser_closed_form, ser_quadrature
from .model import Scheme, SystemConfig, compute_rate_params

__all__ = [
    "PowerSplit",
    "FormulaInfeasibleError",
    "MultimodalObjectiveWarning",
    "closed_form_source_power",
    "closed_form_allocation",
    "numeric_allocation",
    "ser_for_powers",
    "make_split_objective",
    "make_power_objective",
    "ser_power_gradient",
    "stationarity_residual",
]

_CONSTRAINT_RTOL = 1e-9
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class FormulaInfeasibleError(ValueError):
    """The closed-form source power lies outside (0, p_total/2)."""

    def __init__(self, raw_value: float, p_total: float):
        self.raw_value = raw_value
        self.p_total = p_total
        super().__init__(
            f"closed-form source power {raw_value!r} is infeasible for "
            f"p_total={p_total!r} (needs 0 < P_s < p_total/2)"
        )


class MultimodalObjectiveWarning(UserWarning):
    """Grid scan found separated near-equal minima; global grid winner returned."""


@dataclasses.dataclass(frozen=True)
class PowerSplit:
    """A (p_source, p_relay) pair satisfying 2*p_source + p_relay = p_total."""

    p_source: float
    p_relay: float
    p_total: float

    def __post_init__(self):
        if not (self.p_source > 0 and self.p_relay > 0):
            raise ValueError("both power components must be strictly positive")
        if abs(2.0 * self.p_source + self.p_relay - self.p_total) > _CONSTRAINT_RTOL * self.p_total:
            raise ValueError(
                f"2*p_source + p_relay = {2 * self.p_source + self.p_relay!r} "
                f"violates p_total={self.p_total!r}"
            )

    @classmethod
    def from_source(cls, p_source: float, p_total: float) -> "PowerSplit":
        return cls(p_source, p_total - 2.0 * p_source, p_total)

    @classmethod
    def equal(cls, p_total: float) -> "PowerSplit":
        """The equal-split baseline p_source = p_relay = p_total/3."""
        third = p_total / 3.0
        return cls(third, p_total - 2.0 * third, p_total)


def _cbrt(x: float) -> float:
    return math.copysign(abs(x) ** (1.0 / 3.0), x)


def closed_form_source_power(p_total: float, b: float) -> float:
    """Raw evaluation of the cube-root source-power formula, as written.

    Real cube roots are used for negative bases.  No feasibility is implied;
    see closed_form_allocation for the validated version.
    """
    if not (p_total > 0 and b > 0):
        raise ValueError("p_total and b must be positive")
    p = p_total
    inner = (
        -486.0 * p * b
        - 756.0 * p**2 * b**2
        - 81.0
        - 402.0 * p**3 * b**3
        - 51.0 * p * b**4
    )
    base = -135.0 * p * b - 9.0 * p**2 * b**2 + 91.0 * p**3 * b**3 - 27.0 + 12.0 * p * _cbrt(inner)
    a = _cbrt(base)
    bb = 30.0 * p * b + 25.0 * p**2 * b**2 + 9.0
    cc = (-3.0 + 7.0 * p * b) / b
    return (1.0 / (4.0 * b)) * (a + bb / a + cc)


def closed_form_allocation(p_total: float, b: float) -> PowerSplit:
    """Closed-form split with the relay power taken as p_total - 2*p_source
    (the constraint-consistent direction).  Raises FormulaInfeasibleError,
    carrying the raw value, when the formula leaves the feasible interval."""
    p_source = closed_form_source_power(p_total, b)
    if not math.isfinite(p_source) or not (0.0 < p_source < p_total / 2.0):
        raise FormulaInfeasibleError(p_source, p_total)
    return PowerSplit.from_source(p_source, p_total)


def ser_for_powers(
    p_source: float,
    p_relay: float,
    num_relays: int,
    noise_psd: float = 1.0,
    mod_order: int = 2,
    scheme: Scheme = Scheme.ANC,
    variance_s_r: float = 1.0,
    variance_r_d: float = 1.0,
    variance_s_d: float = 1.0,
    method: str = "quadrature",
) -> float:
    """SER of the configured scenario at an arbitrary (p_source, p_relay)
    pair; the rate structure is recomputed per candidate since it depends on
    both powers.  ``method`` selects the quadrature truth (default) or the
    additive closed form."""
    cfg = SystemConfig(
        num_relays=num_relays,
        p_source=p_source,
        p_relay=p_relay,
        noise_psd=noise_psd,
        mod_order=mod_order,
        scheme=scheme,
        variance_s_r=variance_s_r,
        variance_r_d=variance_r_d,
        variance_s_d=variance_s_d,
    )
    rates = compute_rate_params(cfg)
    dist = BestRelayDistribution(num_relays, rates.eta_relay_path)
    params = SerParams.from_rates(mod_order, rates.eta_relay_path, rates.eta_direct)
    if method == "quadrature":
        return ser_quadrature(dist, rates.eta_direct, params)
    if method == "closed_form":
        return ser_closed_form(dist, params).value
    raise ValueError(f"unknown method {method!r}")


def make_power_objective(**scenario) -> Callable[[float, float], float]:
    """SER as a function of raw (p_source, p_relay); keyword arguments are
    forwarded to ser_for_powers."""

    def objective(p_source: float, p_relay: float) -> float:
        return ser_for_powers(p_source, p_relay, **scenario)

    return objective


def make_split_objective(**scenario) -> Callable[[PowerSplit], float]:
    """SER as a function of a PowerSplit; see make_power_objective."""
    f = make_power_objective(**scenario)
    return lambda split: f(split.p_source, split.p_relay)


def _golden_section(f, lo: float, hi: float, tol: float) -> float:
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def numeric_allocation(
    p_total: float,
    objective: Callable[[PowerSplit], float],
    grid_points: int = 64,
    tol_rel: float = 1e-8,
) -> PowerSplit:
    """Minimize ``objective`` over feasible splits: 64-point grid pre-scan to
    locate the basin, then golden-section refinement to tol_rel * p_total.

    Separated grid minima within 1e-12 of the best trigger a
    MultimodalObjectiveWarning and the global grid winner's basin is used.
    """
    if p_total <= 0:
        raise ValueError("p_total must be positive")
    eps = 1e-6 * p_total
    grid = np.linspace(eps, p_total / 2.0 - eps, grid_points)
    values = np.array([objective(PowerSplit.from_source(ps, p_total)) for ps in grid])
    best = int(np.argmin(values))

    interior = np.arange(1, grid_points - 1)
    local_min = interior[
        (values[interior] <= values[interior - 1]) & (values[interior] <= values[interior + 1])
    ]
    near_best = [i for i in local_min if values[i] - values[best] <= 1e-12]
    if len(near_best) > 1 and (max(near_best) - min(near_best)) > 1:
        warnings.warn(
            "objective has separated near-equal minima on the pre-scan grid",
            MultimodalObjectiveWarning,
        )

    lo = float(grid[max(best - 1, 0)])
    hi = float(grid[min(best + 1, grid_points - 1)])
    f = lambda ps: objective(PowerSplit.from_source(ps, p_total))
    p_source = _golden_section(f, lo, hi, tol_rel * p_total)
    return PowerSplit.from_source(float(p_source), p_total)


def ser_power_gradient(
    split: PowerSplit,
    ser_fn: Callable[[float, float], float],
    rel_step: float = 1e-5,
) -> tuple[float, float]:
    """Central-difference partials of the SER w.r.t. each power component."""
    h = rel_step * split.p_total
    ps, pr = split.p_source, split.p_relay
    g_s = (ser_fn(ps + h, pr) - ser_fn(ps - h, pr)) / (2.0 * h)
    g_r = (ser_fn(ps, pr + h) - ser_fn(ps, pr - h)) / (2.0 * h)
    return g_s, g_r


def stationarity_residual(
    split: PowerSplit,
    ser_fn: Callable[[float, float], float],
    rel_step: float = 1e-5,
) -> float:
    """|dSER/dP_s - 2*dSER/dP_r|: eliminating the multiplier from the two
    first-order conditions of the constrained minimization leaves exactly
    this combination, which vanishes at an interior optimum."""
    g_s, g_r = ser_power_gradient(split, ser_fn, rel_step)
    return abs(g_s - 2.0 * g_r)
