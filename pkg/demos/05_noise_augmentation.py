"""
Training-time noise augmentation
================================

Each training epoch can add a perturbed copy of every pattern to the
stream. Three perturbations are available and compose in order:

- gaussian: add sample noise to the waveform, then re-normalize;
- jitter:   wiggle each spike time inside its window;
- add&miss: with probability p, delete a spike / spike a silent slot.

This demo compares a quiet run against heavier settings of each knob.
"""

import numpy as np

from tempotron_psd import (
    AugmentConfig,
    SyntheticConfig,
    TrainConfig,
    classify_batch,
    encode_dataset,
    generate_synthetic,
    normalize_dataset,
    train,
)

train_ds = generate_synthetic(SyntheticConfig(n_per_class=100, seed=0))
test_ds, _ = normalize_dataset(generate_synthetic(
    SyntheticConfig(n_per_class=100, seed=99)))

RUNS = [
    ("defaults (all 1e-4)", AugmentConfig()),
    ("gaussian 0.02", AugmentConfig(gaussian_sigma=0.02)),
    ("jitter 0.3", AugmentConfig(jitter_sigma=0.3)),
    ("add&miss 0.05", AugmentConfig(add_miss_p=0.05)),
    ("augmentation off", AugmentConfig(mode="off")),
]

print("run                    val-best epoch   test accuracy")
for name, noise in RUNS:
    cfg = TrainConfig(epochs=15, seed=5, noise=noise)
    model, log = train(train_ds, cfg)
    batch = encode_dataset(test_ds, cfg.bank(), cfg.theta_amp)
    accuracy = float(np.mean(classify_batch(model, batch) == test_ds.labels))
    print(f"{name:22s}   {log.best_epoch:14d}   {accuracy:13.4f}")

print("\nMild noise acts as a regularizer; extreme settings distort the")
print("training stream and can cost accuracy. The sweet spot is data-")
print("dependent, which is why all three knobs are exposed.")
