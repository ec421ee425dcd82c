"""Order statistics of the selected-relay SNR and MGF-based error analysis.

The selected relay's SNR is modeled as the maximum of N i.i.d. exponential
variables.  From its CDF follow the PDF, the MGF, the average symbol error
rate for MPSK (adaptive quadrature of the MGF product with the direct path,
plus an additive closed-form variant kept for discrepancy reporting) and the
outage probability.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np
from scipy.integrate import quad

__all__ = [
    "BestRelayDistribution",
    "SerParams",
    "QuadratureConvergenceError",
    "UnsupportedModulationError",
    "ClosedFormSer",
    "mpsk_g",
    "best_cdf",
    "best_cdf_series",
    "best_pdf",
    "best_pdf_series",
    "best_mgf",
    "integral_I",
    "ser_quadrature",
    "ser_closed_form",
    "outage_probability",
    "outage_series",
]

# Alternating binomial sums are numerically meaningless past this order;
# the product forms carry no such limit.
_MAX_SERIES_ORDER = 64


class QuadratureConvergenceError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, achieved: float, requested: float):
        self.achieved = achieved
        self.requested = requested
        super().__init__(
            f"quadrature reached absolute error {achieved:.3e}, requested {requested:.3e}"
        )


class UnsupportedModulationError(ValueError):
    """The additive closed form is defined for BPSK only; use ser_quadrature."""


@dataclasses.dataclass(frozen=True)
class BestRelayDistribution:
    """Max of ``num_relays`` i.i.d. exponential SNRs with rate ``eta``."""

    num_relays: int
    eta: float

    def __post_init__(self):
        if not isinstance(self.num_relays, int) or self.num_relays < 1:
            raise ValueError(f"num_relays must be an integer >= 1, got {self.num_relays!r}")
        if not (math.isfinite(self.eta) and self.eta > 0):
            raise ValueError(f"eta must be positive and finite, got {self.eta!r}")


def mpsk_g(mod_order: int) -> float:
    """MPSK SER constant sin^2(pi/M); equals 1 for BPSK."""
    if mod_order < 2:
        raise ValueError("mod_order must be >= 2")
    return math.sin(math.pi / mod_order) ** 2


@dataclasses.dataclass(frozen=True)
class SerParams:
    """Constants of the SER integral: g = sin^2(pi/M) and the per-branch
    ratios c1 = g/eta_relay, c2 = g/eta_direct."""

    mod_order: int
    g: float
    c1: float
    c2: float

    def __post_init__(self):
        if not (0.0 < self.g <= 1.0):
            raise ValueError(f"g must lie in (0, 1], got {self.g!r}")
        if not (self.c1 > 0 and self.c2 > 0):
            raise ValueError("c1 and c2 must be positive")

    @classmethod
    def from_rates(cls, mod_order: int, eta_relay: float, eta_direct: float) -> "SerParams":
        g = mpsk_g(mod_order)
        return cls(mod_order, g, g / eta_relay, g / eta_direct)


def _check_nonnegative(name: str, value) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if np.any(arr < 0):
        raise ValueError(f"{name} must be nonnegative")
    return arr


def _float_binom(n: int, k: int) -> float:
    # multiplicative recurrence, exact in floats for the orders we accept
    out = 1.0
    for i in range(1, k + 1):
        out *= (n - i + 1) / i
    return out


def _check_series_order(n: int) -> None:
    if n > _MAX_SERIES_ORDER:
        raise ValueError(
            f"alternating series is numerically unstable beyond N={_MAX_SERIES_ORDER}; "
            "use the product-form functions"
        )


def best_cdf(dist: BestRelayDistribution, gamma):
    """P(best SNR <= gamma) = (1 - exp(-eta*gamma))^N."""
    g = _check_nonnegative("gamma", gamma)
    out = (-np.expm1(-dist.eta * g)) ** dist.num_relays
    return out if out.ndim else float(out)


def best_cdf_series(dist: BestRelayDistribution, gamma):
    """Binomial expansion of best_cdf; agrees with the product form for N <= 64."""
    _check_series_order(dist.num_relays)
    g = _check_nonnegative("gamma", gamma)
    out = np.zeros_like(g)
    for n in range(dist.num_relays + 1):
        out += _float_binom(dist.num_relays, n) * (-1.0) ** n * np.exp(-n * dist.eta * g)
    return out if out.ndim else float(out)


def best_pdf(dist: BestRelayDistribution, gamma):
    """Density of the best SNR, N*eta*exp(-eta*g)*(1-exp(-eta*g))^(N-1)."""
    g = _check_nonnegative("gamma", gamma)
    n, eta = dist.num_relays, dist.eta
    out = n * eta * np.exp(-eta * g) * (-np.expm1(-eta * g)) ** (n - 1)
    return out if out.ndim else float(out)


def best_pdf_series(dist: BestRelayDistribution, gamma):
    """Alternating-sum form of best_pdf; agrees with the product form for N <= 64."""
    _check_series_order(dist.num_relays)
    g = _check_nonnegative("gamma", gamma)
    out = np.zeros_like(g)
    for n in range(1, dist.num_relays + 1):
        out += (
            n
            * dist.eta
            * _float_binom(dist.num_relays, n)
            * (-1.0) ** (n - 1)
            * np.exp(-n * dist.eta * g)
        )
    return out if out.ndim else float(out)


def best_mgf(dist: BestRelayDistribution, s, per_term_pole: bool = True):
    """E[exp(-s * best SNR)] as an alternating sum over the N order-statistic
    terms.

    With ``per_term_pole=True`` (the form obtained by integrating the density
    term by term) the n-th term has its pole at s = -n*eta.  The
    ``per_term_pole=False`` variant places every pole at s = -eta; it is kept
    only for discrepancy reporting and is not a valid MGF for N >= 2 (its
    value at s = 0 is 0, not 1).
    """
    _check_series_order(dist.num_relays)
    sv = _check_nonnegative("s", s)
    eta = dist.eta
    out = np.zeros_like(sv)
    for n in range(1, dist.num_relays + 1):
        coeff = _float_binom(dist.num_relays, n) * n * (-1.0) ** (n - 1)
        pole = n * eta if per_term_pole else eta
        out += coeff * eta / (sv + pole)
    return out if out.ndim else float(out)


def integral_I(c) -> float:
    """(1/pi) * integral of sin^2(t)/(sin^2(t)+c) over (0, pi/2),
    in closed form 0.5*(1 - sqrt(c/(1+c)))."""
    cv = _check_nonnegative("c", c)
    out = 0.5 * (1.0 - np.sqrt(cv / (1.0 + cv)))
    return out if out.ndim else float(out)


def _direct_mgf(eta_direct: float, s):
    return eta_direct / (s + eta_direct)


def ser_quadrature(
    dist: BestRelayDistribution,
    direct_eta: float | None,
    params: SerParams,
    tol: float = 1e-10,
) -> float:
    """Average MPSK SER of the selected relay path combined with the direct
    path, by adaptive quadrature of the MGF product over (0, (M-1)pi/M].

    ``direct_eta=None`` drops the direct branch (single-path reduction).
    """
    m = params.mod_order
    upper = (m - 1) * math.pi / m

    def integrand(theta: float) -> float:
        sin2 = math.sin(theta) ** 2
        if sin2 == 0.0:
            return 0.0
        s = params.g / sin2
        v = best_mgf(dist, s)
        if direct_eta is not None:
            v *= _direct_mgf(direct_eta, s)
        return v

    value, abserr = quad(integrand, 0.0, upper, epsabs=tol, epsrel=1e-12, limit=200)
    value /= math.pi
    abserr /= math.pi
    if abserr > tol:
        raise QuadratureConvergenceError(abserr, tol)
    return value


@dataclasses.dataclass(frozen=True)
class ClosedFormSer:
    """Additive closed-form SER plus its measured gap to the quadrature truth."""

    value: float
    quadrature: float
    discrepancy: float


def ser_closed_form(dist: BestRelayDistribution, params: SerParams) -> ClosedFormSer:
    """Alternating sum of (I(c1) + I(c2)) terms, evaluated as written.

    The additive combination of the two branch integrals is inconsistent with
    the multiplicative MGF product in the exact integral; the returned
    discrepancy against ser_quadrature quantifies that.  The quadrature path
    is the ground truth everywhere in this package.
    """
    if params.mod_order != 2:
        raise UnsupportedModulationError(
            "closed form is defined for mod_order=2; use ser_quadrature"
        )
    _check_series_order(dist.num_relays)
    term = integral_I(params.c1) + integral_I(params.c2)
    value = 0.0
    for n in range(1, dist.num_relays + 1):
        value += _float_binom(dist.num_relays, n) * (-1.0) ** (n - 1) * term
    exact = ser_quadrature(dist, params.g / params.c2, params)
    return ClosedFormSer(value, exact, abs(value - exact))


def outage_probability(dist: BestRelayDistribution, gamma_th) -> float:
    """P(best SNR < gamma_th); the integral of best_pdf in closed form."""
    return best_cdf(dist, gamma_th)


def outage_series(dist: BestRelayDistribution, gamma_th):
    """Term-by-term integrated form of the outage probability."""
    _check_series_order(dist.num_relays)
    g = _check_nonnegative("gamma_th", gamma_th)
    out = np.zeros_like(g)
    for n in range(1, dist.num_relays + 1):
        ne = n * dist.eta
        out += (
            ne
            * _float_binom(dist.num_relays, n)
            * (-1.0) ** (n - 1)
            * (-np.expm1(-ne * g))
            / ne
        )
    return out if out.ndim else float(out)
