"""Leaky integrate-and-fire neuron with one synaptic efficacy per dendrite.

The membrane potential is a weighted sum of identical postsynaptic
kernels, one copy per incoming spike:

    V(t) = sum_j omega_j * sum_k K(t - s_jk) + V_rest

with the normalized double-exponential kernel

    K(d) = V0 * (exp(-d / tau) - exp(-d / tau_s))   for d >= 0, else 0.

``V0`` scales the kernel peak to exactly 1. The neuron emits class 1
when the potential's maximum over a fixed time grid strictly exceeds
the firing threshold, class 0 otherwise.

Two evaluation routes exist on purpose. :func:`membrane_trace` is the
plain reading of the sum above: every spike contributes one kernel copy
evaluated over the whole grid. :func:`peak_potentials` is the batched
engine used by training and bulk classification; it splits the kernel
into its two exponentials, accumulates per-grid-step spike mass, and
runs one first-order recursive filter per exponential. Both routes
agree to float precision, and the unit tests hold them against each
other.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from scipy.signal import lfilter

from .encoding import GrfBank, SpikePattern, SpikePatternBatch
from .errors import BadTimeConstants, DendriteMismatch, InvalidConfig, ParseError
from .fileio import write_text_atomic
from .runtime import worker_map

DEFAULT_TAU = 8.4
DEFAULT_TAU_S = 2.1
DEFAULT_DT = 0.1


@dataclass(frozen=True)
class KernelParams:
    """Postsynaptic kernel constants; build through :func:`make_kernel`."""

    tau: float
    tau_s: float
    v0: float
    t_peak: float


def make_kernel(tau: float = DEFAULT_TAU, tau_s: float = DEFAULT_TAU_S) -> KernelParams:
    """Derive the peak-normalizing constant for a kernel time-constant pair.

    Requires ``tau > tau_s > 0``; the kernel then rises from 0 to a peak
    of exactly 1 at ``t_peak`` and decays back toward 0.
    """
    if not (tau > tau_s > 0.0):
        raise BadTimeConstants(f"need tau > tau_s > 0, got tau={tau}, tau_s={tau_s}")
    t_peak = tau * tau_s / (tau - tau_s) * math.log(tau / tau_s)
    v0 = 1.0 / (math.exp(-t_peak / tau) - math.exp(-t_peak / tau_s))
    return KernelParams(tau=tau, tau_s=tau_s, v0=v0, t_peak=t_peak)


def kernel_value(kernel: KernelParams, delta) -> np.ndarray:
    """Kernel K evaluated at time offsets ``delta`` (scalar or array).

    Zero for negative offsets, so a spike never acts before it occurs.
    """
    d = np.maximum(np.asarray(delta, dtype=np.float64), 0.0)
    # clipping to 0 also zeroes the causal branch: K(0) == 0 exactly
    return kernel.v0 * (np.exp(-d / kernel.tau) - np.exp(-d / kernel.tau_s))


@dataclass(frozen=True)
class TempotronModel:
    """Trained classifier state: efficacies plus everything needed to
    reproduce its decisions, including the encoder settings when known."""

    omega: np.ndarray
    kernel: KernelParams
    v_th: float = 1.0
    v_rest: float = 0.0
    dt: float = DEFAULT_DT
    bank: GrfBank | None = None
    theta_amp: float | None = None

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=np.float64)
        if omega.ndim != 1 or omega.size < 1:
            raise InvalidConfig("omega must be a non-empty 1-D array")
        if not np.isfinite(omega).all():
            raise InvalidConfig("omega must be finite")
        if not self.v_th > self.v_rest:
            raise InvalidConfig(f"firing threshold {self.v_th} must exceed resting potential {self.v_rest}")
        if not self.dt > 0:
            raise InvalidConfig("dt must be positive")
        if self.bank is not None and self.bank.count != omega.size:
            raise DendriteMismatch(
                f"model has {omega.size} efficacies but {self.bank.count} receptive fields"
            )
        omega = omega.copy()
        omega.setflags(write=False)
        object.__setattr__(self, "omega", omega)

    @property
    def dendrites(self) -> int:
        return self.omega.size

    def with_omega(self, omega: np.ndarray) -> "TempotronModel":
        return replace(self, omega=omega)


@dataclass(frozen=True)
class MembraneTrace:
    """Potential sampled on the time grid, with its running maximum."""

    times: np.ndarray
    potentials: np.ndarray
    v_max: float
    t_max: float
    fired: bool


def time_grid(duration: float, dt: float) -> np.ndarray:
    """Inclusive grid 0, dt, ..., duration."""
    n = int(round(duration / dt))
    return np.arange(n + 1, dtype=np.float64) * dt


def _check_pattern(model: TempotronModel, dendrites: int) -> None:
    if dendrites != model.dendrites:
        raise DendriteMismatch(
            f"pattern has {dendrites} dendrites, model expects {model.dendrites}"
        )


def membrane_trace(model: TempotronModel, pattern: SpikePattern) -> MembraneTrace:
    """Full potential trace of one pattern, one kernel copy per spike.

    Reference route: direct evaluation of the weighted kernel sum. Kept
    deliberately simple; use :func:`peak_potentials` for bulk work.
    """
    _check_pattern(model, pattern.dendrites)
    grid = time_grid(pattern.duration, model.dt)
    present = np.isfinite(pattern.times)
    dendrite, _ = np.nonzero(present)
    spikes = pattern.times[present]
    weights = model.omega[dendrite]

    potentials = np.zeros(grid.size)
    for lo in range(0, spikes.size, 512):
        s = spikes[lo:lo + 512, None]
        w = weights[lo:lo + 512]
        potentials += w @ kernel_value(model.kernel, grid[None, :] - s)
    potentials += model.v_rest

    peak = int(np.argmax(potentials))  # earliest grid point attaining the max
    v_max = float(potentials[peak])
    return MembraneTrace(
        times=grid,
        potentials=potentials,
        v_max=v_max,
        t_max=float(grid[peak]),
        fired=bool(v_max > model.v_th),
    )


def classify(model: TempotronModel, pattern: SpikePattern) -> int:
    """1 when the peak potential strictly exceeds the threshold, else 0."""
    return int(membrane_trace(model, pattern).fired)


def _as_tensor(patterns) -> np.ndarray:
    if isinstance(patterns, SpikePatternBatch):
        return patterns.tensor
    if isinstance(patterns, np.ndarray):
        if patterns.ndim != 3:
            raise InvalidConfig("expected a (dendrites, pulses, windows) tensor")
        return patterns
    stacked = [np.asarray(p.times, dtype=np.float64) for p in patterns]
    if not stacked:
        raise InvalidConfig("cannot classify an empty pattern collection")
    return np.stack(stacked, axis=1)


def _slab_potentials(model: TempotronModel, slab: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Potentials (pulses, grid) for a (dendrites, pulses, windows) slab.

    Each kernel copy splits into its two exponentials; a spike of weight
    w at time s adds w * exp(-(t_g - s)/tau) to the slow accumulator at
    its covering grid step t_g (the first grid point >= s), and likewise
    for tau_s. One recursive filter per exponential then carries the
    accumulated mass down the grid with the right decay per step.
    """
    dendrites, n, _ = slab.shape
    present = np.isfinite(slab)
    j_idx, b_idx, _ = np.nonzero(present)
    s = slab[present]
    w = model.omega[j_idx]

    onset = np.searchsorted(grid, s, side="left")
    keep = onset < grid.size  # spikes past the grid cannot contribute
    onset, s, w, b_idx = onset[keep], s[keep], w[keep], b_idx[keep]
    lead = grid[onset] - s  # in [0, dt)

    flat = b_idx * grid.size + onset
    size = n * grid.size
    k = model.kernel
    mass_slow = np.bincount(flat, weights=w * np.exp(-lead / k.tau), minlength=size)
    mass_fast = np.bincount(flat, weights=w * np.exp(-lead / k.tau_s), minlength=size)
    mass_slow = mass_slow.reshape(n, grid.size)
    mass_fast = mass_fast.reshape(n, grid.size)

    slow = lfilter([1.0], [1.0, -math.exp(-model.dt / k.tau)], mass_slow, axis=1)
    fast = lfilter([1.0], [1.0, -math.exp(-model.dt / k.tau_s)], mass_fast, axis=1)
    return k.v0 * (slow - fast) + model.v_rest


def batch_traces(model: TempotronModel, patterns) -> tuple[np.ndarray, np.ndarray]:
    """Grid and potentials (pulses, grid) via the batched engine.

    Materializes the full potential matrix; intended for modest batch
    sizes (probes, plots, tests).
    """
    tensor = _as_tensor(patterns)
    _check_pattern(model, tensor.shape[0])
    grid = time_grid(float(tensor.shape[2]), model.dt)
    return grid, _slab_potentials(model, tensor, grid)


def peak_potentials(model: TempotronModel, patterns) -> tuple[np.ndarray, np.ndarray]:
    """Peak potential and its (earliest) time for every pattern.

    Returns ``(v_max, t_max)`` arrays of length ``n_pulses``. Memory
    stays bounded: the potential matrix is reduced chunk by chunk.
    """
    tensor = _as_tensor(patterns)
    _check_pattern(model, tensor.shape[0])
    grid = time_grid(float(tensor.shape[2]), model.dt)

    def reduce_slab(slab: np.ndarray) -> np.ndarray:
        pot = _slab_potentials(model, slab, grid)
        peak = np.argmax(pot, axis=1)
        return np.stack([pot[np.arange(pot.shape[0]), peak], grid[peak]])

    parts = worker_map(reduce_slab, tensor, axis=1)
    joined = np.concatenate(parts, axis=1)
    return joined[0], joined[1]


def classify_batch(model: TempotronModel, patterns) -> np.ndarray:
    """Vector of 0/1 decisions, elementwise equal to :func:`classify`."""
    v_max, _ = peak_potentials(model, patterns)
    return (v_max > model.v_th).astype(np.int64)


# --- serialization ---------------------------------------------------------

_MODEL_KEYS = {"omega", "tau", "tau_s", "v0", "v_th", "v_rest", "dt", "grf", "theta_amp"}


def model_to_dict(model: TempotronModel, extra: dict | None = None) -> dict:
    """Self-contained JSON form; requires the encoder settings on board."""
    if model.bank is None or model.theta_amp is None:
        raise InvalidConfig("model is missing its encoder settings; cannot serialize")
    out = {
        "omega": [float(w) for w in model.omega],
        "tau": model.kernel.tau,
        "tau_s": model.kernel.tau_s,
        "v0": model.kernel.v0,
        "v_th": model.v_th,
        "v_rest": model.v_rest,
        "dt": model.dt,
        "grf": {
            "count": model.bank.count,
            "sigma": model.bank.sigma,
            "theta_grf": model.bank.theta,
        },
        "theta_amp": model.theta_amp,
    }
    if extra:
        out.update(extra)
    return out


def model_from_dict(obj: dict) -> TempotronModel:
    try:
        omega = np.asarray(obj["omega"], dtype=np.float64)
        kernel = make_kernel(float(obj["tau"]), float(obj["tau_s"]))
        grf = obj["grf"]
        bank = GrfBank(count=int(grf["count"]), sigma=float(grf["sigma"]),
                       theta=float(grf["theta_grf"]))
        model = TempotronModel(
            omega=omega,
            kernel=kernel,
            v_th=float(obj["v_th"]),
            v_rest=float(obj["v_rest"]),
            dt=float(obj["dt"]),
            bank=bank,
            theta_amp=float(obj["theta_amp"]),
        )
    except DendriteMismatch:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad model object: {exc}")
    stored_v0 = float(obj["v0"])
    if not math.isclose(stored_v0, kernel.v0, rel_tol=1e-9):
        raise ParseError(
            f"stored kernel scale {stored_v0} disagrees with tau/tau_s (expected {kernel.v0})"
        )
    return model


def save_model(model: TempotronModel, path, extra: dict | None = None) -> None:
    text = json.dumps(model_to_dict(model, extra), indent=2) + "\n"
    write_text_atomic(Path(path), text)


def load_model(path) -> TempotronModel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: not valid JSON: {exc}")
    if not isinstance(obj, dict):
        raise ParseError(f"{path}: model file must hold a JSON object")
    return model_from_dict(obj)
