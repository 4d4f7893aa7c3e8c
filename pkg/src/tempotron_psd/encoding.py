"""Two-stage spike encoding of normalized pulses.

Stage one (latency): sample ``i`` (1-based) owns the unit time window
``[i-1, i]``; an amplitude ``x`` at or above the amplitude threshold fires
at ``s = i - x``, so stronger samples spike earlier in their window.
Weaker samples stay silent.

Stage two (receptive fields): each latency spike is fanned out across a
bank of Gaussian tuning curves with means evenly spaced over the unit
window. A curve responding with ``r`` (peak-normalized, in ``(0, 1]``)
at or above the response threshold places a spike on its dendrite at
``window_start + (1 - r)``: the stronger the response, the earlier the
spike. Sub-threshold responses produce no spike.

Spike containers are float arrays with ``NaN`` marking absent spikes,
which keeps every operation vectorizable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfig, NotNormalized
from .pulses import Dataset, Pulse
from .runtime import worker_map

ABSENT = np.nan

DEFAULT_THETA_AMP = 0.01
DEFAULT_GRF_SIGMA = 0.15
DEFAULT_GRF_THETA = 0.1


@dataclass(frozen=True)
class LatencyTrain:
    """Per-window spike times of one pulse; entry i is NaN when silent."""

    times: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        if times.ndim != 1:
            raise InvalidConfig("latency train must be 1-D")
        times = times.copy()
        times.setflags(write=False)
        object.__setattr__(self, "times", times)

    def __len__(self) -> int:
        return self.times.size


@dataclass(frozen=True)
class GrfBank:
    """Bank of Gaussian receptive fields, one per dendrite.

    Means are evenly spaced over [0, 1]; all fields share one width and
    one response threshold.
    """

    count: int = 25
    sigma: float = DEFAULT_GRF_SIGMA
    theta: float = DEFAULT_GRF_THETA

    def __post_init__(self):
        if self.count < 2:
            raise InvalidConfig(f"need at least 2 receptive fields, got {self.count}")
        if self.sigma <= 0:
            raise InvalidConfig("sigma must be positive")
        if not 0.0 < self.theta < 1.0:
            raise InvalidConfig("response threshold must lie in (0, 1)")

    @property
    def means(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.count)


@dataclass(frozen=True)
class SpikePattern:
    """Spike times on all dendrites of one encoded pulse.

    ``times[j, i]`` is the spike of dendrite ``j`` in window ``i``
    (spanning ``[i, i+1]`` on the absolute time axis), or NaN. The
    pattern duration equals the window count.
    """

    times: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        if times.ndim != 2:
            raise InvalidConfig("spike pattern must be 2-D (dendrites, windows)")
        times = times.copy()
        times.setflags(write=False)
        object.__setattr__(self, "times", times)

    @property
    def dendrites(self) -> int:
        return self.times.shape[0]

    @property
    def duration(self) -> float:
        return float(self.times.shape[1])

    def spike_count(self) -> int:
        return int(np.isfinite(self.times).sum())


class SpikePatternBatch:
    """Encoded dataset as one tensor of shape (dendrites, n_pulses, windows).

    Behaves as an ordered collection of :class:`SpikePattern`.
    """

    def __init__(self, tensor: np.ndarray):
        tensor = np.asarray(tensor, dtype=np.float64)
        if tensor.ndim != 3:
            raise InvalidConfig("pattern batch tensor must be 3-D (dendrites, pulses, windows)")
        tensor = tensor.copy()
        tensor.setflags(write=False)
        self.tensor = tensor

    @property
    def dendrites(self) -> int:
        return self.tensor.shape[0]

    @property
    def duration(self) -> float:
        return float(self.tensor.shape[2])

    def __len__(self) -> int:
        return self.tensor.shape[1]

    def __getitem__(self, i: int) -> SpikePattern:
        return SpikePattern(self.tensor[:, i, :])

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]


def _check_normalized(samples: np.ndarray, what: str) -> None:
    bad = (samples < 0.0) | (samples > 1.0)
    if bad.any():
        idx = np.unravel_index(int(np.argmax(bad)), samples.shape)
        raise NotNormalized(f"{what}: sample {idx} = {samples[idx]} outside [0, 1]")


def _latency_times(samples: np.ndarray, theta_amp: float) -> np.ndarray:
    """Vectorized latency rule; works on (..., windows) sample arrays."""
    windows = np.arange(1, samples.shape[-1] + 1, dtype=np.float64)
    times = windows - samples
    return np.where(samples >= theta_amp, times, ABSENT)


def encode_latency(pulse: Pulse, theta_amp: float = DEFAULT_THETA_AMP) -> LatencyTrain:
    """Latency-encode one normalized pulse.

    Raises :class:`NotNormalized` if any sample falls outside [0, 1].
    """
    _check_normalized(pulse.samples, "pulse")
    return LatencyTrain(_latency_times(pulse.samples, theta_amp))


def _grf_times(latency: np.ndarray, bank: GrfBank) -> np.ndarray:
    """Fan latency times (..., windows) out to (count, ..., windows)."""
    window_start = np.floor(latency)  # == window index where present
    fraction = latency - window_start
    mu = bank.means.reshape((bank.count,) + (1,) * latency.ndim)
    z = (fraction - mu) / bank.sigma
    response = np.exp(-0.5 * z * z)
    times = window_start + (1.0 - response)
    return np.where(np.isfinite(latency) & (response >= bank.theta), times, ABSENT)


def encode_grf(train: LatencyTrain, bank: GrfBank) -> SpikePattern:
    """Fan one latency train out across the receptive-field bank."""
    return SpikePattern(_grf_times(train.times, bank))


def encode_pulse(pulse: Pulse, bank: GrfBank, theta_amp: float = DEFAULT_THETA_AMP) -> SpikePattern:
    """Both encoding stages for one pulse."""
    return encode_grf(encode_latency(pulse, theta_amp), bank)


def encode_dataset(ds: Dataset, bank: GrfBank, theta_amp: float = DEFAULT_THETA_AMP) -> SpikePatternBatch:
    """Encode every pulse of a dataset into one spike tensor.

    The batched result is identical to encoding each pulse separately;
    order is preserved. Offending pulses are reported by index.
    """
    if len(ds) == 0:
        raise InvalidConfig("cannot encode an empty dataset")
    bad = (ds.samples < 0.0) | (ds.samples > 1.0)
    if bad.any():
        row = int(np.argmax(bad.any(axis=1)))
        raise NotNormalized(f"pulse {row} is not normalized to [0, 1]")

    def encode_rows(samples: np.ndarray) -> np.ndarray:
        latency = _latency_times(samples, theta_amp)  # (b, windows)
        return _grf_times(latency, bank)  # (count, b, windows)

    chunks = worker_map(encode_rows, ds.samples, axis=0)
    return SpikePatternBatch(np.concatenate(chunks, axis=1))


def encode_samples(samples: np.ndarray, bank: GrfBank, theta_amp: float = DEFAULT_THETA_AMP) -> np.ndarray:
    """Encode a raw (n_pulses, windows) sample array to a spike tensor.

    Low-level path used by training, where samples are already validated.
    """
    return _grf_times(_latency_times(samples, theta_amp), bank)


def dump_pattern(pattern: SpikePattern) -> str:
    """Render a pattern in the debug dump format.

    One line per dendrite; token i is ``i:<time>`` for a spike in window
    i and ``-`` when absent.
    """
    lines = []
    for row in pattern.times:
        tokens = [
            f"{i}:{float(t)!r}" if np.isfinite(t) else "-"
            for i, t in enumerate(row)
        ]
        lines.append(" ".join(tokens))
    return "\n".join(lines) + "\n"
