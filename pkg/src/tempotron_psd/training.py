"""Gradient-free tempotron training.

Each misclassified pattern pushes every efficacy by the total kernel
drive its dendrite delivered up to the potential peak:

    delta_j = sum over spikes s of dendrite j, s < t_max, of K(t_max - s)

added when the neuron stayed silent on a class-1 pattern and subtracted
when it fired on a class-0 pattern. Updates are averaged over each
mini-batch, scaled by a stepwise-halving learning rate, and smoothed by
momentum across batches.

The learning rate starts at the top of its interval and halves every 20
epochs, never dropping below the bottom of the interval.

Training tracks validation loss (fraction misclassified) after every
epoch and returns the model whose efficacies scored the lowest
validation loss, earliest epoch winning ties.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .augment import AugmentConfig, augmented_patterns
from .encoding import GrfBank, SpikePattern, encode_samples
from .errors import (
    InvalidConfig,
    LengthMismatch,
    NotLogged,
    SingleClassDataset,
    UnlabeledDataset,
)
from .neuron import (
    MembraneTrace,
    TempotronModel,
    kernel_value,
    make_kernel,
    membrane_trace,
    peak_potentials,
)
from .pulses import Dataset, normalize_dataset
from .seeding import rng_stream

logger = logging.getLogger(__name__)

HALVING_PERIOD = 20


def lr_schedule(epoch: int, lr_low: float, lr_high: float) -> float:
    """Learning rate for a 1-based epoch: halve every 20 epochs, floored."""
    if epoch < 1:
        raise InvalidConfig(f"epochs are 1-based, got {epoch}")
    return max(lr_low, lr_high / 2.0 ** ((epoch - 1) // HALVING_PERIOD))


def momentum_update(dw_prev: np.ndarray, dw_raw: np.ndarray, epsilon: float) -> np.ndarray:
    """Blend the previous applied update into the new one."""
    dw_prev = np.asarray(dw_prev, dtype=np.float64)
    dw_raw = np.asarray(dw_raw, dtype=np.float64)
    if dw_prev.shape != dw_raw.shape:
        raise LengthMismatch(f"update shapes differ: {dw_prev.shape} vs {dw_raw.shape}")
    return epsilon * dw_prev + (1.0 - epsilon) * dw_raw


def delta_omega(model: TempotronModel, pattern: SpikePattern, label: int) -> np.ndarray:
    """Unscaled efficacy correction for one pattern.

    Zero when the pattern is already classified correctly; otherwise the
    per-dendrite kernel drive at the potential peak, signed toward the
    desired decision.

    A should-fire pattern whose potential never rose above rest has no
    usable peak (and a peak-anchored update would be identically zero,
    a state nothing could escape), so its strengthening update is
    anchored at the pattern end instead, where every spike contributes.
    """
    if label not in (0, 1):
        raise InvalidConfig(f"label must be 0 or 1, got {label}")
    v_max, t_max = peak_potentials(model, [pattern])
    predicted = int(v_max[0] > model.v_th)
    if predicted == label:
        return np.zeros(model.dendrites)
    anchor = _update_anchors(np.asarray([t_max[0]]), np.asarray([label]), pattern.duration)
    drive = _kernel_drive(model, pattern.times[:, None, :], anchor)
    sign = 1.0 if label == 1 else -1.0
    return sign * drive[:, 0]


def _update_anchors(t_max: np.ndarray, labels: np.ndarray, duration: float) -> np.ndarray:
    """Update anchor times for misclassified patterns.

    Normally the potential peak; for should-fire patterns stuck at rest
    (peak pinned to t=0, before every spike) the pattern end.
    """
    return np.where((labels == 1) & (t_max == 0.0), duration, t_max)


def _kernel_drive(model: TempotronModel, tensor: np.ndarray, t_max: np.ndarray) -> np.ndarray:
    """Per-dendrite kernel sums K(t_max - s) for a (J, B, W) spike tensor.

    Returns (J, B). Spikes at or after t_max contribute exactly zero.
    """
    delta = t_max[None, :, None] - tensor
    k = kernel_value(model.kernel, np.where(np.isfinite(delta), delta, -1.0))
    return k.sum(axis=2)


@dataclass
class TrainLog:
    """Per-epoch history of one training run (epoch numbers are 1-based)."""

    lr: list = field(default_factory=list)
    train_loss: list = field(default_factory=list)
    val_loss: list = field(default_factory=list)
    best_epoch: int = 0
    init_omega: np.ndarray | None = None
    final_omega: np.ndarray | None = None
    snapshots: dict = field(default_factory=dict)
    updates: list = field(default_factory=list)
    probes: dict = field(default_factory=dict)

    @property
    def epochs(self) -> int:
        return len(self.val_loss)


def snapshot_efficacies(log: TrainLog, epoch: int) -> np.ndarray:
    """Efficacy snapshot recorded at ``epoch``; raises if never recorded."""
    if epoch not in log.snapshots:
        raise NotLogged(f"no efficacy snapshot at epoch {epoch}")
    return log.snapshots[epoch]


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 300
    lr_low: float = 1e-6
    lr_high: float = 1e-3
    momentum: float = 0.9
    batch_size: int = 16
    dendrites: int = 25
    seed: int = 0
    init_low: float = -0.4
    init_high: float = 0.4
    validation_fraction: float = 0.2
    tau: float = 8.4
    tau_s: float = 2.1
    v_th: float = 1.0
    v_rest: float = 0.0
    dt: float = 0.1
    grf_sigma: float = 0.15
    grf_theta: float = 0.1
    theta_amp: float = 0.01
    noise: AugmentConfig = field(default_factory=AugmentConfig)
    snapshot_every: int = 0
    record_updates: bool = False
    probe_indices: tuple = ()

    def __post_init__(self):
        if self.epochs < 1:
            raise InvalidConfig("need at least one epoch")
        if not (0.0 < self.lr_low <= self.lr_high):
            raise InvalidConfig("need 0 < lr_low <= lr_high")
        if not 0.0 <= self.momentum < 1.0:
            raise InvalidConfig(f"momentum must be in [0, 1), got {self.momentum}")
        if self.batch_size < 1:
            raise InvalidConfig("batch size must be >= 1")
        if self.init_low >= self.init_high:
            raise InvalidConfig("efficacy init interval is empty")
        if not 0.0 < self.validation_fraction < 1.0:
            raise InvalidConfig("validation fraction must be in (0, 1)")
        if not 0.0 <= self.theta_amp < 1.0:
            raise InvalidConfig("amplitude threshold must be in [0, 1)")
        if self.snapshot_every < 0:
            raise InvalidConfig("snapshot interval must be >= 0")

    def bank(self) -> GrfBank:
        return GrfBank(count=self.dendrites, sigma=self.grf_sigma, theta=self.grf_theta)


def split_dataset(n: int, fraction: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Shuffled (train_idx, val_idx) split; both sides non-empty."""
    n_val = int(round(fraction * n))
    n_val = min(max(n_val, 1), n - 1)
    if n < 2:
        raise InvalidConfig("need at least 2 pulses to split off validation data")
    perm = rng.permutation(n)
    return perm[n_val:], perm[:n_val]


def train(ds: Dataset, cfg: TrainConfig) -> tuple[TempotronModel, TrainLog]:
    """Fit a tempotron to a labeled pulse dataset.

    The dataset is normalized, split into training and validation parts,
    and encoded once; augmented copies of the training pulses join the
    stream per the noise config. Identical seeds give identical models.
    """
    if not ds.labeled:
        raise UnlabeledDataset("training needs labels")
    ds, skipped = normalize_dataset(ds)
    if skipped:
        logger.warning("dropped %d pulses that could not be normalized", skipped)
    if len(np.unique(ds.labels)) < 2:
        raise SingleClassDataset("training needs both classes present")

    kernel = make_kernel(cfg.tau, cfg.tau_s)
    bank = cfg.bank()
    train_idx, val_idx = split_dataset(len(ds), cfg.validation_fraction,
                                       rng_stream(cfg.seed, "split"))
    train_samples = ds.samples[train_idx]
    train_labels = ds.labels[train_idx]
    val_tensor = encode_samples(ds.samples[val_idx], bank, cfg.theta_amp)
    val_labels = ds.labels[val_idx]
    clean_tensor = encode_samples(train_samples, bank, cfg.theta_amp)

    init_rng = rng_stream(cfg.seed, "init")
    omega = init_rng.uniform(cfg.init_low, cfg.init_high, cfg.dendrites)
    model = TempotronModel(omega=omega, kernel=kernel, v_th=cfg.v_th,
                           v_rest=cfg.v_rest, dt=cfg.dt, bank=bank,
                           theta_amp=cfg.theta_amp)
    log = TrainLog(init_omega=omega.copy())

    shuffle_rng = rng_stream(cfg.seed, "shuffle")
    augment_rng = rng_stream(cfg.seed, "augment")
    fixed_tensor = None
    if cfg.noise.mode == "fixed":
        fixed_tensor = augmented_patterns(train_samples, cfg.noise, augment_rng,
                                          bank, cfg.theta_amp)

    dw_prev = np.zeros(cfg.dendrites)
    best_loss = np.inf
    best_omega = omega.copy()
    for epoch in range(1, cfg.epochs + 1):
        lr = lr_schedule(epoch, cfg.lr_low, cfg.lr_high)
        if cfg.noise.mode == "per_epoch":
            extra = augmented_patterns(train_samples, cfg.noise, augment_rng,
                                       bank, cfg.theta_amp)
        else:
            extra = fixed_tensor
        if extra is not None:
            stream = np.concatenate([clean_tensor, extra], axis=1)
            stream_labels = np.concatenate([train_labels, train_labels])
        else:
            stream = clean_tensor
            stream_labels = train_labels

        order = shuffle_rng.permutation(stream.shape[1])
        errors = 0
        for lo in range(0, order.size, cfg.batch_size):
            batch_idx = order[lo:lo + cfg.batch_size]
            batch = stream[:, batch_idx, :]
            labels = stream_labels[batch_idx]
            v_max, t_max = peak_potentials(model, batch)
            predicted = (v_max > cfg.v_th).astype(np.int64)
            wrong = predicted != labels
            errors += int(wrong.sum())
            if wrong.any():
                anchors = _update_anchors(t_max[wrong], labels[wrong], float(stream.shape[2]))
                drive = _kernel_drive(model, batch[:, wrong, :], anchors)
                signs = np.where(labels[wrong] == 1, 1.0, -1.0)
                dw_raw = (drive @ signs) / batch_idx.size
            else:
                dw_raw = np.zeros(cfg.dendrites)
            dw = momentum_update(dw_prev, lr * dw_raw, cfg.momentum)
            omega = omega + dw
            dw_prev = dw
            if cfg.record_updates:
                log.updates.append(dw)
            model = model.with_omega(omega)

        val_pred = (peak_potentials(model, val_tensor)[0] > cfg.v_th).astype(np.int64)
        val_loss = float(np.mean(val_pred != val_labels))
        log.lr.append(lr)
        log.train_loss.append(errors / stream.shape[1])
        log.val_loss.append(val_loss)
        if cfg.snapshot_every and epoch % cfg.snapshot_every == 0:
            log.snapshots[epoch] = omega.copy()
        if val_loss < best_loss:
            best_loss = val_loss
            best_omega = omega.copy()
            log.best_epoch = epoch

    log.final_omega = omega.copy()
    best = model.with_omega(best_omega)
    for idx in cfg.probe_indices:
        pattern = SpikePattern(encode_samples(ds.samples[idx][None, :], bank,
                                              cfg.theta_amp)[:, 0, :])
        log.probes[int(idx)] = membrane_trace(best, pattern)
    return best, log


def psp_probe(model: TempotronModel, pattern: SpikePattern) -> MembraneTrace:
    """Full membrane trace of one pattern under a trained model."""
    return membrane_trace(model, pattern)
