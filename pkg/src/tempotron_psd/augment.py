"""Training-time data augmentation.

Three independent corruptions, applied to fresh copies of the training
pulses while the originals stay in the stream:

* signal noise — i.i.d. Gaussian sample noise on the waveform, which is
  then re-normalized before encoding;
* spike jitter — Gaussian displacement of every spike time, clamped to
  the spike's own unit window;
* add & miss — every present spike is deleted with probability ``p`` and
  every silent slot gains a uniformly placed spike with the same
  probability.

Validation and test data are never augmented.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .encoding import ABSENT, GrfBank, SpikePattern, encode_samples
from .errors import AllZeroPulse, InvalidConfig
from .pulses import Pulse, _normalize_rows

MODES = ("per_epoch", "fixed", "off")

DEFAULT_SIGMA_G = 1e-4
DEFAULT_SIGMA_J = 1e-4
DEFAULT_ADD_MISS_P = 1e-4


@dataclass(frozen=True)
class AugmentConfig:
    gaussian_sigma: float = DEFAULT_SIGMA_G
    jitter_sigma: float = DEFAULT_SIGMA_J
    add_miss_p: float = DEFAULT_ADD_MISS_P
    mode: str = "per_epoch"

    def __post_init__(self):
        if self.gaussian_sigma < 0 or self.jitter_sigma < 0:
            raise InvalidConfig("noise widths must be >= 0")
        if not 0.0 <= self.add_miss_p <= 1.0:
            raise InvalidConfig(f"add&miss probability must be in [0, 1], got {self.add_miss_p}")
        if self.mode not in MODES:
            raise InvalidConfig(f"mode must be one of {MODES}, got {self.mode!r}")

    @property
    def enabled(self) -> bool:
        return self.mode != "off"


def gaussian_rows(samples: np.ndarray, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Noisy, re-normalized copies of (n, windows) sample rows.

    With ``sigma == 0`` the rows come back untouched (no re-normalization
    pass, which would re-shave any baseline-window residue).
    """
    if sigma == 0.0:
        return samples.copy()
    noisy = samples + rng.normal(0.0, sigma, samples.shape)
    out = _normalize_rows(noisy)
    if np.isnan(out[:, 0]).any():
        bad = int(np.argmax(np.isnan(out[:, 0])))
        raise AllZeroPulse(f"pulse {bad} lost its peak under noise")
    return out


def jitter_times(times: np.ndarray, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Displace every spike in (..., windows) arrays, clamped to its window."""
    if sigma == 0.0:
        return times.copy()
    windows = np.arange(times.shape[-1], dtype=np.float64)
    moved = times + rng.normal(0.0, sigma, times.shape)
    return np.clip(moved, windows, windows + 1.0)  # NaN slots stay NaN


def add_miss_times(times: np.ndarray, p: float, rng: np.random.Generator) -> np.ndarray:
    """Randomly delete present spikes and fill silent slots, rate ``p`` each."""
    if p == 0.0:
        return times.copy()
    present = np.isfinite(times)
    flip = rng.random(times.shape) < p
    position = rng.random(times.shape)
    windows = np.arange(times.shape[-1], dtype=np.float64)
    out = np.where(present & ~flip, times, ABSENT)
    added = ~present & flip
    out = np.where(added, windows + position, out)
    return out


def augment_gaussian(pulse: Pulse, sigma: float, rng: np.random.Generator) -> Pulse:
    rows = gaussian_rows(pulse.samples[None, :], sigma, rng)
    return Pulse(rows[0], label=pulse.label)


def augment_jitter(pattern: SpikePattern, sigma: float, rng: np.random.Generator) -> SpikePattern:
    return SpikePattern(jitter_times(pattern.times, sigma, rng))


def augment_add_miss(pattern: SpikePattern, p: float, rng: np.random.Generator) -> SpikePattern:
    return SpikePattern(add_miss_times(pattern.times, p, rng))


def augmented_patterns(
    samples: np.ndarray,
    cfg: AugmentConfig,
    rng: np.random.Generator,
    bank: GrfBank,
    theta_amp: float,
) -> np.ndarray:
    """One corrupted encoding pass over (n, windows) sample rows.

    Signal noise acts before encoding; jitter and add & miss act on the
    resulting spike tensor. Returns a (dendrites, n, windows) tensor.
    """
    rows = gaussian_rows(samples, cfg.gaussian_sigma, rng)
    tensor = encode_samples(rows, bank, theta_amp)
    tensor = jitter_times(tensor, cfg.jitter_sigma, rng)
    return add_miss_times(tensor, cfg.add_miss_p, rng)
