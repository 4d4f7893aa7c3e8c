"""
Training the tempotron
======================

A tempotron is a leaky integrate-and-fire neuron with one trainable
efficacy per dendrite. It fires when its membrane potential crosses
threshold; firing means "gamma", silence means "neutron". Training
nudges the efficacies whenever the decision is wrong, using the spikes
that arrived before the potential's peak.
"""

import numpy as np

from tempotron_psd import (
    SyntheticConfig,
    TrainConfig,
    classify_batch,
    encode_dataset,
    generate_synthetic,
    membrane_trace,
    normalize_dataset,
    train,
)

train_ds = generate_synthetic(SyntheticConfig(n_per_class=100, seed=0))
cfg = TrainConfig(epochs=20, seed=5)
model, log = train(train_ds, cfg)

print("epoch    lr        train loss   val loss")
for e in (1, 2, 5, 10, 20):
    print(f"{e:5d}  {log.lr[e - 1]:.1e}   {log.train_loss[e - 1]:10.4f}"
          f"   {log.val_loss[e - 1]:8.4f}")
print(f"\nbest validation epoch: {log.best_epoch}")

# Score fresh pulses the model has never seen.
test_ds, _ = normalize_dataset(generate_synthetic(
    SyntheticConfig(n_per_class=100, seed=99)))
batch = encode_dataset(test_ds, cfg.bank(), cfg.theta_amp)
predicted = classify_batch(model, batch)
accuracy = float(np.mean(predicted == test_ds.labels))
print(f"held-out accuracy: {accuracy:.4f} on {len(test_ds)} pulses")

# Peek at the membrane potential for one pulse of each class: the gamma
# trace should cross threshold, the neutron trace should stay under it.
for label, name in ((0, "neutron"), (1, "gamma")):
    idx = int(np.flatnonzero(test_ds.labels == label)[0])
    trace = membrane_trace(model, batch[idx])
    peak = float(trace.potentials.max())
    fired = "fires" if peak > model.v_th else "stays quiet"
    print(f"{name:8s} pulse {idx}: peak potential {peak:7.3f} -> {fired}")
