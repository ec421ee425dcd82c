"""Symbol-level Monte Carlo of the two-slot MARC protocol.

Slot 1: both sources transmit simultaneously; every relay and the destination
receive the superposition.  Slot 2: the selected relay forwards (amplified
superposition under ANC, network-coded re-modulated symbol under DF-NC) and
the destination runs joint maximum-likelihood detection of the symbol pair
over all M^2 hypotheses with full channel knowledge.

Randomness is counter-based: trial t always belongs to batch t // BATCH_SIZE,
and batch b draws from Philox(seed) jumped b times, so a result depends only
on (config, seed, trials) no matter how work is scheduled.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .model import (
    Scheme,
    SystemConfig,
    LinkGains,
    _anc_snr,
    _complex_gaussian,
    _gammas,
    config_at_snr_db,
)

__all__ = [
    "BATCH_SIZE",
    "TrialResult",
    "SerEstimate",
    "modulate",
    "relay_normalization",
    "run_anc_trial",
    "run_df_trial",
    "estimate_ser",
    "estimate_outage",
    "sample_best_snr",
    "single_link_ser",
]

# Fixed so that the mapping from trial index to random draws never changes.
BATCH_SIZE = 1 << 14

_Z95 = 1.959963984540054


@dataclasses.dataclass(frozen=True)
class TrialResult:
    """Outcome of one protocol round."""

    s1_error: bool
    s2_error: bool
    selected_relay: int
    best_snr: float


@dataclasses.dataclass(frozen=True)
class SerEstimate:
    """Error-rate estimate with a 95% Wilson confidence half-width."""

    errors: int
    trials: int
    ser: float
    ci_halfwidth: float

    def __post_init__(self):
        if self.errors > self.trials:
            raise ValueError("errors cannot exceed trials")


def _wilson_estimate(errors: int, trials: int) -> SerEstimate:
    p = errors / trials
    z2 = _Z95 * _Z95
    denom = 1.0 + z2 / trials
    half = _Z95 * math.sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials * trials)) / denom
    return SerEstimate(errors, trials, p, half)


def modulate(symbol_index, mod_order: int):
    """Unit-energy MPSK point exp(2j*pi*index/M)."""
    idx = np.asarray(symbol_index)
    if np.any(idx < 0) or np.any(idx >= mod_order):
        raise ValueError(f"symbol index out of range [0, {mod_order})")
    out = np.exp(2j * np.pi * idx / mod_order)
    return out if out.ndim else complex(out)


def relay_normalization(config: SystemConfig) -> float:
    """Amplitude normalization sqrt(E|relay input|^2), computed from the
    statistical model (both sources at p_source over the source-relay
    variance, plus receiver noise)."""
    return math.sqrt(2.0 * config.p_source * config.variance_s_r + config.noise_psd)


def _batch_rng(seed: int, batch_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed).jumped(batch_index))


@dataclasses.dataclass(frozen=True)
class _GainBatch:
    h_s1_r: np.ndarray  # (B, N)
    h_s2_r: np.ndarray
    h_r_d: np.ndarray
    h_s1_d: np.ndarray  # (B,)
    h_s2_d: np.ndarray


def _sample_gain_batch(config: SystemConfig, rng: np.random.Generator, size: int) -> _GainBatch:
    n = config.num_relays
    return _GainBatch(
        _complex_gaussian(rng, config.variance_s_r, (size, n)),
        _complex_gaussian(rng, config.variance_s_r, (size, n)),
        _complex_gaussian(rng, config.variance_r_d, (size, n)),
        _complex_gaussian(rng, config.variance_s_d, size),
        _complex_gaussian(rng, config.variance_s_d, size),
    )


def _gains_as_batch(gains: LinkGains) -> _GainBatch:
    return _GainBatch(
        np.asarray(gains.h_s1_r)[None, :],
        np.asarray(gains.h_s2_r)[None, :],
        np.asarray(gains.h_r_d)[None, :],
        np.atleast_1d(np.asarray(gains.h_s1_d)),
        np.atleast_1d(np.asarray(gains.h_s2_d)),
    )


def _pair_grid(mod_order: int):
    const = np.exp(2j * np.pi * np.arange(mod_order) / mod_order)
    ii, jj = np.divmod(np.arange(mod_order * mod_order), mod_order)
    return const, ii, jj


def _select(config: SystemConfig, gb: _GainBatch):
    """Per-trial selection SNRs, selected index and bottleneck SNR."""
    gamma_s, gamma_r = _gammas(config)
    a1 = np.abs(gb.h_s1_r) ** 2
    a2 = np.abs(gb.h_s2_r) ** 2
    if config.scheme is Scheme.ANC:
        c = np.abs(gb.h_r_d) ** 2
        snr1 = _anc_snr(a1, c, gamma_s, gamma_r)
        snr2 = _anc_snr(a2, c, gamma_s, gamma_r)
    else:
        snr1 = a1 * gamma_r
        snr2 = a2 * gamma_r
    bottleneck = np.minimum(snr1, snr2)
    sel = np.argmax(bottleneck, axis=1)
    rows = np.arange(sel.shape[0])
    return sel, bottleneck[rows, sel]


def _run_batch(config: SystemConfig, gb: _GainBatch, rng: np.random.Generator):
    """One vectorized batch of protocol rounds; returns error flags, the
    selected relay index and the selection-bottleneck SNR per trial."""
    m = config.mod_order
    const, ii, jj = _pair_grid(m)
    size = gb.h_s1_d.shape[0]
    n0 = config.noise_psd
    sp = math.sqrt(config.p_source)
    sr = math.sqrt(config.p_relay)

    sel, best = _select(config, gb)
    rows = np.arange(size)
    h1b = gb.h_s1_r[rows, sel]
    h2b = gb.h_s2_r[rows, sel]
    hrb = gb.h_r_d[rows, sel]

    i1 = rng.integers(0, m, size)
    i2 = rng.integers(0, m, size)
    x1 = const[i1]
    x2 = const[i2]
    # selection depends on the gains only, so only the selected relay's
    # receiver noise is ever realized
    n_relay = _complex_gaussian(rng, n0, size)
    n_d1 = _complex_gaussian(rng, n0, size)
    n_d2 = _complex_gaussian(rng, n0, size)

    y1 = sp * (gb.h_s1_d * x1 + gb.h_s2_d * x2) + n_d1
    mu1 = sp * (gb.h_s1_d[:, None] * const[ii] + gb.h_s2_d[:, None] * const[jj])
    y_relay = sp * (h1b * x1 + h2b * x2) + n_relay

    if config.scheme is Scheme.ANC:
        amp = sr / relay_normalization(config)
        y2 = amp * hrb * y_relay + n_d2
        var2 = amp * amp * np.abs(hrb) ** 2 * n0 + n0
        mu2 = amp * hrb[:, None] * sp * (h1b[:, None] * const[ii] + h2b[:, None] * const[jj])
        metric = np.abs(y1[:, None] - mu1) ** 2 / n0 + np.abs(y2[:, None] - mu2) ** 2 / var2[:, None]
    else:
        # relay jointly decodes the pair, then forwards the modulo-M combine
        mu_r = sp * (h1b[:, None] * const[ii] + h2b[:, None] * const[jj])
        k_relay = np.argmin(np.abs(y_relay[:, None] - mu_r) ** 2, axis=1)
        forwarded = const[(ii[k_relay] + jj[k_relay]) % m]
        y2 = sr * hrb * forwarded + n_d2
        mu2 = sr * hrb[:, None] * const[(ii + jj) % m]
        metric = np.abs(y1[:, None] - mu1) ** 2 + np.abs(y2[:, None] - mu2) ** 2

    k = np.argmin(metric, axis=1)
    return ii[k] != i1, jj[k] != i2, sel, best


def run_anc_trial(config: SystemConfig, gains: LinkGains, rng: np.random.Generator) -> TrialResult:
    """One ANC round on a fixed channel realization."""
    if config.scheme is not Scheme.ANC:
        raise ValueError("config.scheme must be ANC")
    e1, e2, sel, best = _run_batch(config, _gains_as_batch(gains), rng)
    return TrialResult(bool(e1[0]), bool(e2[0]), int(sel[0]), float(best[0]))


def run_df_trial(config: SystemConfig, gains: LinkGains, rng: np.random.Generator) -> TrialResult:
    """One DF-NC round on a fixed channel realization.  Relay decoding errors
    propagate into the forwarded symbol; there is no genie."""
    if config.scheme is not Scheme.DF_NC:
        raise ValueError("config.scheme must be DF_NC")
    e1, e2, sel, best = _run_batch(config, _gains_as_batch(gains), rng)
    return TrialResult(bool(e1[0]), bool(e2[0]), int(sel[0]), float(best[0]))


def estimate_ser(
    config: SystemConfig,
    snr_db: float,
    trials: int,
    seed: int,
    max_errors: int | None = 400,
    min_trials: int = 10_000,
) -> tuple[SerEstimate, SerEstimate]:
    """Per-source SER at one SNR point (total power over noise, dB).

    The budget 10^(snr_db/10) * noise_psd is split under the config's kappa.
    With ``max_errors`` set, the trial loop stops at the first batch boundary
    where both sources have accumulated that many errors (and at least
    ``min_trials`` trials ran); pass None to force the full trial count.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    cfg = config_at_snr_db(config, snr_db)
    err1 = err2 = done = batch = 0
    while done < trials:
        size = min(BATCH_SIZE, trials - done)
        rng = _batch_rng(seed, batch)
        gb = _sample_gain_batch(cfg, rng, size)
        e1, e2, _, _ = _run_batch(cfg, gb, rng)
        err1 += int(e1.sum())
        err2 += int(e2.sum())
        done += size
        batch += 1
        if max_errors is not None and done >= min_trials and min(err1, err2) >= max_errors:
            break
    return _wilson_estimate(err1, done), _wilson_estimate(err2, done)


def sample_best_snr(config: SystemConfig, trials: int, seed: int) -> np.ndarray:
    """Selection-bottleneck SNR of the chosen relay for ``trials`` fading
    draws (no symbols are transmitted)."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    out = np.empty(trials)
    done = batch = 0
    while done < trials:
        size = min(BATCH_SIZE, trials - done)
        rng = _batch_rng(seed, batch)
        gb = _sample_gain_batch(config, rng, size)
        _, best = _select(config, gb)
        out[done : done + size] = best
        done += size
        batch += 1
    return out


def estimate_outage(
    config: SystemConfig, snr_db: float, gamma_th: float, trials: int, seed: int
) -> float:
    """Fraction of fading draws whose selected-relay SNR falls below gamma_th."""
    if gamma_th < 0:
        raise ValueError("gamma_th must be nonnegative")
    cfg = config_at_snr_db(config, snr_db)
    best = sample_best_snr(cfg, trials, seed)
    return float(np.mean(best < gamma_th))


def single_link_ser(snr_db: float, trials: int, seed: int, mod_order: int = 2) -> SerEstimate:
    """Coherent MPSK over one Rayleigh link (no relays): the end-to-end
    calibration baseline.  For BPSK the exact average SER is
    0.5*(1 - sqrt(gbar/(1+gbar))) with gbar the mean SNR."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    gbar = 10.0 ** (snr_db / 10.0)
    amp = math.sqrt(gbar)
    const = np.exp(2j * np.pi * np.arange(mod_order) / mod_order)
    errors = done = batch = 0
    while done < trials:
        size = min(BATCH_SIZE, trials - done)
        rng = _batch_rng(seed, batch)
        h = _complex_gaussian(rng, 1.0, size)
        idx = rng.integers(0, mod_order, size)
        noise = _complex_gaussian(rng, 1.0, size)
        y = amp * h * const[idx] + noise
        k = np.argmin(np.abs(y[:, None] - amp * h[:, None] * const[None, :]) ** 2, axis=1)
        errors += int((k != idx).sum())
        done += size
        batch += 1
    return _wilson_estimate(errors, done)
