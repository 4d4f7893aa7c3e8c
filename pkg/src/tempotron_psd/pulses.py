"""Pulse representation, normalization, dataset I/O, and synthetic generation.

A pulse is one digitized detector waveform. Datasets hold many pulses of a
common length, optionally with ground-truth particle labels (neutron = 0,
gamma-ray = 1). The synthetic generator produces labeled double-exponential
pulses whose falling edge differs by class: gamma pulses decay fast, neutron
pulses carry a larger slow component, mirroring the physics that makes pulse
shape discrimination possible.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import AllZeroPulse, BadLabel, InvalidConfig, ParseError, RaggedRows
from .fileio import write_text_atomic
from .seeding import rng_stream

log = logging.getLogger(__name__)

NEUTRON = 0
GAMMA = 1

#: Fraction of leading samples averaged for the baseline estimate.
BASELINE_FRACTION = 0.05

#: Significant digits used when writing pulse CSV files. Nine digits make
#: decimal -> double -> decimal round-trips exact for realistic amplitudes.
CSV_PRECISION = 9


@dataclass(frozen=True)
class Pulse:
    """One waveform plus an optional particle label (0 neutron, 1 gamma)."""

    samples: np.ndarray
    label: int | None = None

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1 or samples.size < 2:
            raise InvalidConfig(f"pulse must be a 1-D vector of length >= 2, got shape {samples.shape}")
        if not np.all(np.isfinite(samples)):
            raise InvalidConfig("pulse contains non-finite samples")
        if self.label is not None and self.label not in (NEUTRON, GAMMA):
            raise BadLabel(f"label must be 0 or 1, got {self.label!r}")
        samples = samples.copy()
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return self.samples.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.samples, dtype=dtype)


@dataclass(frozen=True)
class Dataset:
    """Ordered collection of equal-length pulses, labeled all-or-none."""

    samples: np.ndarray
    labels: np.ndarray | None = None
    name: str = ""

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 2:
            raise InvalidConfig(f"dataset samples must be 2-D (n_pulses, length), got shape {samples.shape}")
        if not np.all(np.isfinite(samples)):
            raise InvalidConfig("dataset contains non-finite samples")
        samples = samples.copy()
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=np.int64)
            if labels.shape != (samples.shape[0],):
                raise InvalidConfig("labels must be one per pulse")
            if not np.all((labels == NEUTRON) | (labels == GAMMA)):
                raise BadLabel("labels must be 0 or 1")
            labels = labels.copy()
            labels.setflags(write=False)
            object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return self.samples.shape[0]

    def __getitem__(self, i: int) -> Pulse:
        label = None if self.labels is None else int(self.labels[i])
        return Pulse(self.samples[i], label)

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    @property
    def length(self) -> int:
        """Sample count per pulse."""
        return self.samples.shape[1]

    @property
    def labeled(self) -> bool:
        return self.labels is not None


def baseline_window(length: int) -> int:
    """Number of leading samples averaged for the baseline estimate."""
    return max(1, math.ceil(BASELINE_FRACTION * length))


def _normalize_rows(samples: np.ndarray) -> np.ndarray:
    """Baseline-subtract, clamp at zero, and peak-scale each row.

    Rows whose maximum after baseline subtraction is <= 0 come back as
    all-NaN; callers decide whether to raise or skip.
    """
    k = baseline_window(samples.shape[1])
    base = samples[:, :k].mean(axis=1, keepdims=True)
    shifted = np.maximum(samples - base, 0.0)
    peak = shifted.max(axis=1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(peak > 0, shifted / peak, np.nan)
    return out


def normalize(pulse: Pulse | np.ndarray) -> Pulse:
    """Return a copy of ``pulse`` scaled to the unit range.

    The baseline (mean of the first 5% of samples, at least one) is
    subtracted, negative residuals are clamped to zero, and the result is
    divided by its maximum so the peak sample is exactly 1. A bare 1-D
    array is accepted in place of a :class:`Pulse`.

    Raises
    ------
    AllZeroPulse
        If no sample is strictly positive after baseline subtraction.
    """
    if not isinstance(pulse, Pulse):
        pulse = Pulse(np.asarray(pulse, dtype=np.float64))
    out = _normalize_rows(pulse.samples[np.newaxis, :])[0]
    if np.isnan(out[0]):
        raise AllZeroPulse("pulse is flat after baseline removal")
    return Pulse(out, pulse.label)


def normalize_dataset(ds: Dataset) -> tuple[Dataset, int]:
    """Normalize every pulse, skipping the ones that fail.

    Returns the normalized dataset and the number of skipped pulses; a
    warning is logged when any are dropped.
    """
    out = _normalize_rows(ds.samples)
    good = ~np.isnan(out[:, 0])
    skipped = int(np.sum(~good))
    if skipped:
        log.warning("normalize_dataset: skipped %d flat pulse(s) of %d", skipped, len(ds))
    labels = None if ds.labels is None else ds.labels[good]
    return Dataset(out[good], labels, ds.name), skipped


@dataclass(frozen=True)
class SyntheticConfig:
    """Parameters of the double-exponential pulse generator.

    Decay constants are in sample units. Each pulse rises with constant
    ``rise`` and decays as a mix of a fast and a slow exponential; the
    slow-component fraction is the class separator (gamma low, neutron
    high). ``onset`` delays the pulse start so the leading samples form a
    flat baseline region, as in real digitizer traces.
    """

    n_per_class: int = 500
    length: int = 280
    fast_decay: float = 10.0
    slow_decay: float = 200.0
    rise: float = 2.0
    gamma_slow_fraction: float = 0.05
    neutron_slow_fraction: float = 0.30
    amplitude_jitter: float = 0.10
    noise_sigma: float = 0.02
    onset: int = 25
    seed: int = 0

    def validate(self) -> None:
        if self.n_per_class < 1:
            raise InvalidConfig("n_per_class must be >= 1")
        if self.length < 2:
            raise InvalidConfig("length must be >= 2")
        if not (0 < self.rise < self.fast_decay < self.slow_decay):
            raise InvalidConfig(
                "decay constants must satisfy 0 < rise < fast_decay < slow_decay, "
                f"got rise={self.rise}, fast_decay={self.fast_decay}, slow_decay={self.slow_decay}"
            )
        for field in ("gamma_slow_fraction", "neutron_slow_fraction"):
            value = getattr(self, field)
            if not 0.0 <= value <= 1.0:
                raise InvalidConfig(f"{field} must lie in [0, 1], got {value}")
        if self.neutron_slow_fraction <= self.gamma_slow_fraction:
            raise InvalidConfig("neutron_slow_fraction must exceed gamma_slow_fraction")
        if not 0.0 <= self.amplitude_jitter < 1.0:
            raise InvalidConfig("amplitude_jitter must lie in [0, 1)")
        if self.noise_sigma < 0:
            raise InvalidConfig("noise_sigma must be >= 0")
        if not 0 <= self.onset < self.length:
            raise InvalidConfig("onset must lie in [0, length)")


def _class_waveform(cfg: SyntheticConfig, slow_fraction: float) -> np.ndarray:
    """Unit-amplitude-usable template: zero before onset, double-exp after."""
    t = np.arange(cfg.length, dtype=np.float64) - cfg.onset
    active = t >= 0
    ta = t[active]
    rise = np.exp(-ta / cfg.rise)
    fast = np.exp(-ta / cfg.fast_decay) - rise
    slow = np.exp(-ta / cfg.slow_decay) - rise
    shape = np.zeros(cfg.length)
    shape[active] = (1.0 - slow_fraction) * fast + slow_fraction * slow
    return shape


def generate_synthetic(cfg: SyntheticConfig) -> Dataset:
    """Generate ``2 * n_per_class`` labeled, normalized pulses.

    Neutron pulses (label 0) come first, then gamma-ray pulses (label 1).
    Deterministic for a fixed seed.
    """
    cfg.validate()
    n = cfg.n_per_class
    rng = rng_stream(cfg.seed, "synthetic")

    templates = np.vstack([
        np.tile(_class_waveform(cfg, cfg.neutron_slow_fraction), (n, 1)),
        np.tile(_class_waveform(cfg, cfg.gamma_slow_fraction), (n, 1)),
    ])
    amplitude = 1.0 + cfg.amplitude_jitter * rng.uniform(-1.0, 1.0, size=2 * n)
    raw = templates * amplitude[:, np.newaxis]
    if cfg.noise_sigma > 0:
        raw = raw + rng.normal(0.0, cfg.noise_sigma, size=raw.shape)

    out = _normalize_rows(raw)
    bad = np.flatnonzero(np.isnan(out[:, 0]))
    if bad.size:
        raise AllZeroPulse(f"generated pulse {bad[0]} is flat; lower noise_sigma")
    labels = np.concatenate([np.zeros(n, dtype=np.int64), np.ones(n, dtype=np.int64)])
    return Dataset(out, labels, name=f"synthetic-seed{cfg.seed}")


def with_seed(cfg: SyntheticConfig, seed: int) -> SyntheticConfig:
    """Copy of ``cfg`` with a different seed (handy for fresh test sets)."""
    return replace(cfg, seed=seed)


# --- CSV I/O ----------------------------------------------------------------
#
# Format: one pulse per line, fields comma-separated, '\n' endings, no
# header. With labels, column 0 is the integer label (0 or 1) and the
# remaining columns are samples.


def _format_value(x: float) -> str:
    return f"{x:.{CSV_PRECISION}g}"


def save_dataset(ds: Dataset, path) -> None:
    """Write ``ds`` as pulse CSV, with a leading label column when labeled."""
    lines = []
    for i in range(len(ds)):
        fields = [_format_value(v) for v in ds.samples[i]]
        if ds.labels is not None:
            fields.insert(0, str(int(ds.labels[i])))
        lines.append(",".join(fields))
    write_text_atomic(path, "\n".join(lines) + "\n")


def load_dataset(path, has_labels: bool, name: str = "") -> Dataset:
    """Parse a pulse CSV file.

    Raises
    ------
    ParseError
        On any field that is not a finite real (row and column reported),
        or if the file holds no rows.
    RaggedRows
        If rows have different widths.
    BadLabel
        If a label field is not 0 or 1.
    """
    rows: list[list[float]] = []
    labels: list[int] = []
    width = None
    with open(path, "r") as fh:
        # Positions in error messages are 1-based, as in editors.
        for row_idx, line in enumerate(fh, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line:
                continue
            fields = line.split(",")
            if width is None:
                width = len(fields)
            elif len(fields) != width:
                raise RaggedRows(f"row {row_idx} has {len(fields)} columns, expected {width}")
            values = []
            for col_idx, field in enumerate(fields, start=1):
                try:
                    value = float(field)
                except ValueError:
                    raise ParseError(f"row {row_idx}, column {col_idx}: {field!r} is not a number") from None
                if not math.isfinite(value):
                    raise ParseError(f"row {row_idx}, column {col_idx}: non-finite value {field!r}")
                values.append(value)
            if has_labels:
                if values[0] not in (0.0, 1.0):
                    raise BadLabel(f"row {row_idx}: label must be 0 or 1, got {fields[0]!r}")
                labels.append(int(values[0]))
                values = values[1:]
            if not values:
                raise ParseError(f"row {row_idx}: no sample columns")
            rows.append(values)
    if not rows:
        raise ParseError(f"{path}: no pulse rows")
    return Dataset(np.array(rows), np.array(labels) if has_labels else None, name=name or str(path))
