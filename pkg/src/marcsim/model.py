"""Scenario configuration, Rayleigh fading realizations, per-relay SNRs and
best-relay selection for a two-source multiple-access relay channel (MARC).

Two sources transmit simultaneously to N relays and one destination; a single
relay is selected (max-min of the two per-source SNRs) to forward in the
second slot, either amplifying the analog superposition (ANC) or decoding and
network-coding the symbol pair (DF-NC).
"""

from __future__ import annotations

import dataclasses
import enum
import math

import numpy as np

__all__ = [
    "Scheme",
    "SystemConfig",
    "LinkGains",
    "RateParams",
    "sample_channels",
    "compute_rate_params",
    "bottleneck_rate",
    "anc_relay_snr",
    "df_relay_snr",
    "select_best_relay",
    "config_at_total_power",
    "config_at_snr_db",
]

_REL_TOL = 1e-9


class Scheme(enum.Enum):
    """Forwarding protocol used by the selected relay."""

    ANC = "anc"
    DF_NC = "df"


def _require_positive(name: str, value) -> None:
    if not (math.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be positive and finite, got {value!r}")


@dataclasses.dataclass(frozen=True)
class SystemConfig:
    """All scenario parameters for one run.

    Powers are linear watts.  ``kappa`` ties per-source power to relay power
    (p_source = kappa * p_relay); pass None to derive it from the powers.
    Channel variances may be zero to model an absent link.
    """

    num_relays: int
    p_source: float
    p_relay: float
    noise_psd: float = 1.0
    kappa: float | None = None
    mod_order: int = 2
    scheme: Scheme = Scheme.ANC
    variance_s_r: float = 1.0
    variance_r_d: float = 1.0
    variance_s_d: float = 1.0

    def __post_init__(self):
        if not isinstance(self.num_relays, int) or self.num_relays < 1:
            raise ValueError(f"num_relays must be an integer >= 1, got {self.num_relays!r}")
        _require_positive("p_source", self.p_source)
        _require_positive("p_relay", self.p_relay)
        _require_positive("noise_psd", self.noise_psd)
        m = self.mod_order
        if not isinstance(m, int) or m < 2 or (m & (m - 1)) != 0:
            raise ValueError(f"mod_order must be a power of two >= 2, got {m!r}")
        if not isinstance(self.scheme, Scheme):
            raise ValueError(f"scheme must be a Scheme, got {self.scheme!r}")
        for name in ("variance_s_r", "variance_r_d", "variance_s_d"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {v!r}")
        if self.kappa is None:
            object.__setattr__(self, "kappa", self.p_source / self.p_relay)
        else:
            _require_positive("kappa", self.kappa)
            if abs(self.p_source - self.kappa * self.p_relay) > _REL_TOL * self.p_source:
                raise ValueError(
                    "inconsistent kappa: p_source=%r != kappa*p_relay=%r"
                    % (self.p_source, self.kappa * self.p_relay)
                )

    @property
    def p_total(self) -> float:
        """Total budget 2*p_source + p_relay."""
        return 2.0 * self.p_source + self.p_relay


@dataclasses.dataclass(frozen=True, eq=False)
class LinkGains:
    """One joint realization of all complex fading coefficients."""

    h_s1_r: np.ndarray  # source 1 -> relay j, length N
    h_s2_r: np.ndarray  # source 2 -> relay j, length N
    h_r_d: np.ndarray   # relay j -> destination, length N
    h_s1_d: complex     # source 1 -> destination
    h_s2_d: complex     # source 2 -> destination

    def __post_init__(self):
        n = len(self.h_s1_r)
        if not (len(self.h_s2_r) == n and len(self.h_r_d) == n):
            raise ValueError("relay gain lists must all have the same length")

    @property
    def num_relays(self) -> int:
        return len(self.h_s1_r)


@dataclasses.dataclass(frozen=True)
class RateParams:
    """Exponential rate parameters of the link SNR classes.

    eta_relay_path is the rate of the per-relay end-to-end SNR (for ANC the
    high-SNR sum-of-reciprocals form; for DF-NC the single-hop form) and
    eta_direct the rate of the source->destination SNR.
    """

    eta_relay_path: float
    eta_direct: float
    gamma_s: float
    gamma_r: float

    def __post_init__(self):
        for f in dataclasses.fields(self):
            _require_positive(f.name, getattr(self, f.name))


def _gammas(config: SystemConfig) -> tuple[float, float]:
    gamma_s = config.p_source / (config.noise_psd * (1.0 + config.kappa))
    gamma_r = config.p_relay / config.noise_psd
    return gamma_s, gamma_r


def compute_rate_params(config: SystemConfig) -> RateParams:
    """Rate parameters implied by the configured powers and variances."""
    gamma_s, gamma_r = _gammas(config)
    if config.scheme is Scheme.ANC:
        if config.variance_s_r == 0 or config.variance_r_d == 0:
            raise ValueError("zero link variance has no exponential rate")
        eta_relay = 1.0 / (gamma_s * config.variance_s_r) + 1.0 / (gamma_r * config.variance_r_d)
    else:
        if config.variance_s_r == 0:
            raise ValueError("zero link variance has no exponential rate")
        eta_relay = 1.0 / (gamma_r * config.variance_s_r)
    if config.variance_s_d == 0:
        raise ValueError("zero link variance has no exponential rate")
    eta_direct = 1.0 / (gamma_s * config.variance_s_d)
    return RateParams(eta_relay, eta_direct, gamma_s, gamma_r)


def bottleneck_rate(config: SystemConfig) -> float:
    """Exponential rate of min(per-source SNRs) at one relay.

    The min over the two sources doubles the source-side rate; the
    relay->destination hop is shared and enters once.  Exact for DF-NC,
    a high-SNR approximation for ANC.
    """
    gamma_s, gamma_r = _gammas(config)
    if config.scheme is Scheme.ANC:
        if config.variance_s_r == 0 or config.variance_r_d == 0:
            raise ValueError("zero link variance has no exponential rate")
        return 2.0 / (gamma_s * config.variance_s_r) + 1.0 / (gamma_r * config.variance_r_d)
    if config.variance_s_r == 0:
        raise ValueError("zero link variance has no exponential rate")
    return 2.0 / (gamma_r * config.variance_s_r)


def _complex_gaussian(rng: np.random.Generator, variance: float, size) -> np.ndarray:
    # circularly symmetric, E|h|^2 = variance; real part drawn before imag
    re = rng.standard_normal(size)
    im = rng.standard_normal(size)
    return (re + 1j * im) * math.sqrt(variance / 2.0)


def sample_channels(config: SystemConfig, rng: np.random.Generator) -> LinkGains:
    """Draw one i.i.d. Rayleigh realization of every link."""
    n = config.num_relays
    h_s1_r = _complex_gaussian(rng, config.variance_s_r, n)
    h_s2_r = _complex_gaussian(rng, config.variance_s_r, n)
    h_r_d = _complex_gaussian(rng, config.variance_r_d, n)
    h_s1_d = complex(_complex_gaussian(rng, config.variance_s_d, ()))
    h_s2_d = complex(_complex_gaussian(rng, config.variance_s_d, ()))
    return LinkGains(h_s1_r, h_s2_r, h_r_d, h_s1_d, h_s2_d)


def _anc_snr(gain_sr_sq, gain_rd_sq, gamma_s: float, gamma_r: float):
    num = gamma_s * gain_sr_sq * gamma_r * gain_rd_sq
    den = gain_sr_sq * gamma_s + gain_rd_sq * gamma_r + 1.0
    return num / den


def anc_relay_snr(gain_sr_sq, gain_rd_sq, rates: RateParams):
    """End-to-end SNR of one amplified relay path.

    Accepts scalars or arrays.  The denominator is >= 1, so a zero gain on
    either hop gives SNR 0 without a division hazard.
    """
    return _anc_snr(gain_sr_sq, gain_rd_sq, rates.gamma_s, rates.gamma_r)


def df_relay_snr(gain_sq, gamma_r: float):
    """Receive SNR of one source->relay link under decode-and-forward."""
    return gain_sq * gamma_r


def select_best_relay(per_relay_snrs_s1, per_relay_snrs_s2) -> int:
    """Index of the relay maximizing min(SNR from source 1, SNR from source 2).

    Ties break toward the lowest index.
    """
    s1 = np.asarray(per_relay_snrs_s1, dtype=float)
    s2 = np.asarray(per_relay_snrs_s2, dtype=float)
    if s1.size == 0 or s2.size == 0:
        raise ValueError("per-relay SNR lists must be nonempty")
    if s1.shape != s2.shape:
        raise ValueError("per-relay SNR lists must have equal length")
    return int(np.argmax(np.minimum(s1, s2)))


def config_at_total_power(config: SystemConfig, p_total: float) -> SystemConfig:
    """Same scenario with the power budget re-split under the config's kappa.

    2*p_source + p_relay = p_total with p_source = kappa * p_relay; the
    default kappa = 1 gives the equal split p_source = p_relay = p_total/3.
    """
    _require_positive("p_total", p_total)
    p_relay = p_total / (2.0 * config.kappa + 1.0)
    p_source = config.kappa * p_relay
    return dataclasses.replace(config, p_source=p_source, p_relay=p_relay)


def config_at_snr_db(config: SystemConfig, snr_db: float) -> SystemConfig:
    """Powers from an SNR axis value, read as total power over noise in dB."""
    p_total = config.noise_psd * 10.0 ** (snr_db / 10.0)
    return config_at_total_power(config, p_total)
