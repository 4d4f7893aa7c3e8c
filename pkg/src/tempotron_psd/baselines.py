"""Classical pulse-shape discrimination methods.

Every method reduces a pulse to one scalar factor; neutrons and gammas
then separate as two modes in the factor histogram, split at the valley
between them. Gates are expressed in samples relative to the pulse peak.

Methods
-------
cc   charge comparison: delayed-gate integral over total-gate integral
ci   delayed-gate integral alone
zc   zero-crossing time of the bipolar-shaped pulse, relative to the peak
pga  amplitude a fixed offset after the peak, over the peak amplitude
fga  difference of two low-frequency spectrum magnitudes
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import find_peaks, lfilter

from .errors import (
    DegenerateRange,
    Empty,
    GateOutOfRange,
    InvalidConfig,
    LengthMismatch,
    PeakNotFound,
    SingleClass,
    Unimodal,
)
from .fileio import write_text_atomic
from .pulses import GAMMA, NEUTRON, Dataset, Pulse

METHODS = ("cc", "zc", "ci", "pga", "fga")

FWHM_PER_STD = 2.0 * math.sqrt(2.0 * math.log(2.0))


@dataclass(frozen=True)
class BaselineConfig:
    """Gate and shaping constants shared by the classical methods."""

    delayed_gate_start: int = 10   # samples after the peak
    long_gate_end: int | None = None  # None: integrate to the pulse end
    pga_offset: int = 20
    fga_k1: int = 1
    fga_k2: int = 2
    zc_shaping: float = 10.0       # CR-RC^2 time constant, samples
    hist_bins: int = 64

    def __post_init__(self):
        if self.delayed_gate_start < 1:
            raise InvalidConfig("delayed gate must start after the peak")
        if self.long_gate_end is not None and self.long_gate_end <= self.delayed_gate_start:
            raise InvalidConfig("long gate must end after the delayed gate starts")
        if self.pga_offset < 1:
            raise InvalidConfig("comparison offset must be >= 1")
        if self.fga_k1 == self.fga_k2 or self.fga_k1 < 0 or self.fga_k2 < 0:
            raise InvalidConfig("frequency bins must be distinct and non-negative")
        if self.zc_shaping <= 0:
            raise InvalidConfig("shaping constant must be positive")
        if self.hist_bins < 2:
            raise InvalidConfig("need at least 2 histogram bins")


def _peak_index(samples: np.ndarray) -> int:
    peak = int(np.argmax(samples))
    if samples[peak] <= 0:
        raise PeakNotFound("pulse has no positive peak")
    return peak


def _gates(samples: np.ndarray, cfg: BaselineConfig) -> tuple[int, int, int]:
    """(peak, delayed_start, long_end) as absolute indices, bounds-checked."""
    peak = _peak_index(samples)
    delayed = peak + cfg.delayed_gate_start
    end = samples.size if cfg.long_gate_end is None else peak + cfg.long_gate_end
    if delayed >= samples.size or end > samples.size:
        raise GateOutOfRange(
            f"gate [{delayed}, {end}) exceeds pulse length {samples.size}"
        )
    return peak, delayed, end


def shape_bipolar(samples: np.ndarray, shaping: float) -> np.ndarray:
    """CR-RC^2 shaping: one differentiator, two integrators.

    Turns a unipolar pulse into a bipolar one whose zero crossing moves
    later for slower-decaying inputs.
    """
    a = math.exp(-1.0 / shaping)
    out = lfilter([a, -a], [1.0, -a], np.asarray(samples, dtype=np.float64))
    for _ in range(2):
        out = lfilter([1.0 - a], [1.0, -a], out)
    return out


def zero_crossing_time(shaped: np.ndarray) -> float:
    """Interpolated index where the shaped pulse first turns negative
    after its maximum."""
    start = int(np.argmax(shaped))
    after = shaped[start:]
    below = np.nonzero(after < 0.0)[0]
    if below.size == 0:
        raise PeakNotFound("shaped pulse never crosses zero")
    i = int(below[0])  # first strictly negative sample; i >= 1 since after[0] > 0
    hi, lo = after[i - 1], after[i]
    return start + i - 1 + hi / (hi - lo)


def factor(method: str, pulse: Pulse, cfg: BaselineConfig | None = None) -> float:
    """Discrimination factor of one pulse under the chosen method."""
    cfg = cfg or BaselineConfig()
    samples = pulse.samples
    if method == "cc":
        peak, delayed, end = _gates(samples, cfg)
        return float(samples[delayed:end].sum() / samples[peak:end].sum())
    if method == "ci":
        _, delayed, end = _gates(samples, cfg)
        return float(samples[delayed:end].sum())
    if method == "pga":
        peak = _peak_index(samples)
        at = peak + cfg.pga_offset
        if at >= samples.size:
            raise GateOutOfRange(f"comparison sample {at} exceeds pulse length {samples.size}")
        return float(samples[at] / samples[peak])
    if method == "fga":
        spectrum = np.abs(np.fft.rfft(samples))
        if max(cfg.fga_k1, cfg.fga_k2) >= spectrum.size:
            raise GateOutOfRange(
                f"frequency bin {max(cfg.fga_k1, cfg.fga_k2)} exceeds spectrum size {spectrum.size}"
            )
        return float(spectrum[cfg.fga_k1] - spectrum[cfg.fga_k2])
    if method == "zc":
        peak = _peak_index(samples)
        return float(zero_crossing_time(shape_bipolar(samples, cfg.zc_shaping)) - peak)
    raise InvalidConfig(f"unknown method {method!r}; choose from {METHODS}")


def factor_series(method: str, ds: Dataset, cfg: BaselineConfig | None = None) -> "FactorSeries":
    if len(ds) == 0:
        raise Empty("empty dataset")
    values = np.array([factor(method, p, cfg) for p in ds])
    return FactorSeries(method=method, factors=values)


@dataclass(frozen=True)
class FactorSeries:
    """Factors of a whole dataset, plus the decision state once classified."""

    method: str
    factors: np.ndarray
    threshold: float | None = None
    low_label: int = GAMMA
    predicted: np.ndarray | None = None

    def __post_init__(self):
        factors = np.asarray(self.factors, dtype=np.float64)
        if factors.ndim != 1 or factors.size == 0:
            raise Empty("factor series must be non-empty and 1-D")
        factors = factors.copy()
        factors.setflags(write=False)
        object.__setattr__(self, "factors", factors)

    def __len__(self) -> int:
        return self.factors.size


def histogram(values: np.ndarray, bins: int) -> tuple[np.ndarray, np.ndarray]:
    """(edges, counts) over [min, max]; all values land in some bin."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise Empty("nothing to histogram")
    if bins < 2:
        raise InvalidConfig("need at least 2 histogram bins")
    lo, hi = float(values.min()), float(values.max())
    if lo == hi:
        raise DegenerateRange(f"all factors equal {lo}; no histogram range")
    counts, edges = np.histogram(values, bins=bins, range=(lo, hi))
    return edges, counts


def valley_threshold(values: np.ndarray, bins: int) -> float:
    """Histogram valley between the two dominant modes.

    The two highest peaks of the factor histogram are located (ties break
    toward the lower bin) and the threshold is placed at the left edge of
    the emptiest bin strictly between them.
    """
    edges, counts = histogram(values, bins)
    padded = np.concatenate([[-1], counts, [-1]])  # lets edge bins count as peaks
    peaks, _ = find_peaks(padded, plateau_size=1)
    peaks -= 1
    if peaks.size < 2:
        raise Unimodal("factor histogram has fewer than two modes")
    order = sorted(peaks, key=lambda i: (-counts[i], i))
    p1, p2 = sorted(order[:2])
    between = counts[p1 + 1:p2]
    if between.size == 0:
        return float(edges[p2])
    valley = p1 + 1 + int(np.argmin(between))
    return float(edges[valley])


def classify_by_valley(
    series: FactorSeries,
    threshold: float | None = None,
    truth: np.ndarray | None = None,
    bins: int = 64,
) -> FactorSeries:
    """Split a factor series at the histogram valley (or a given threshold).

    Factors below the threshold get ``low_label``; by default the low
    side is called gamma, but when truth labels are supplied the low side
    is assigned to whichever class has the lower mean factor.
    """
    if threshold is None:
        threshold = valley_threshold(series.factors, bins)
    low_label = GAMMA
    if truth is not None:
        truth = np.asarray(truth)
        if truth.size != len(series):
            raise LengthMismatch(f"{truth.size} labels for {len(series)} factors")
        if len(np.unique(truth)) == 2:
            mean_n = series.factors[truth == NEUTRON].mean()
            mean_g = series.factors[truth == GAMMA].mean()
            low_label = NEUTRON if mean_n < mean_g else GAMMA
    predicted = np.where(series.factors < threshold, low_label, 1 - low_label)
    return FactorSeries(
        method=series.method,
        factors=series.factors,
        threshold=float(threshold),
        low_label=low_label,
        predicted=predicted.astype(np.int64),
    )


def figure_of_merit(series: FactorSeries, labels: np.ndarray) -> float:
    """Separation quality |mu_a - mu_b| / (FWHM_a + FWHM_b).

    Infinite for perfectly separated zero-width classes; zero when the
    class factor distributions coincide.
    """
    labels = np.asarray(labels)
    if labels.size != len(series):
        raise LengthMismatch(f"{labels.size} labels for {len(series)} factors")
    classes = np.unique(labels)
    if classes.size < 2:
        raise SingleClass("figure of merit needs both classes")
    a = series.factors[labels == classes[0]]
    b = series.factors[labels == classes[1]]
    gap = abs(float(a.mean()) - float(b.mean()))
    width = FWHM_PER_STD * (float(a.std()) + float(b.std()))
    if width == 0.0:
        return math.inf if gap > 0.0 else 0.0
    return gap / width


def write_factor_csv(series: FactorSeries, path, truth: np.ndarray | None = None) -> None:
    """Per-pulse factor table: ``pulse_idx,factor,predicted,truth``."""
    lines = ["pulse_idx,factor,predicted,truth"]
    for i in range(len(series)):
        pred = "" if series.predicted is None else str(int(series.predicted[i]))
        lab = "" if truth is None else str(int(truth[i]))
        lines.append(f"{i},{float(series.factors[i])!r},{pred},{lab}")
    write_text_atomic(path, "\n".join(lines) + "\n")
