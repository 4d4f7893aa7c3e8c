"""
From waveform to spikes
=======================

The tempotron does not see raw samples. Each pulse is turned into spike
times in two stages:

1. latency coding - sample i with amplitude x spikes at time i - x, so
   bigger amplitudes spike earlier inside their one-sample window;
   samples below an amplitude floor stay silent;
2. receptive-field fan-out - each latency is compared against a bank of
   Gaussian tuning curves, and every sufficiently excited curve emits
   its own spike on a separate dendrite.

This demo walks one pulse through both stages.
"""

import numpy as np

from tempotron_psd import (
    GrfBank,
    Pulse,
    SyntheticConfig,
    dump_pattern,
    encode_latency,
    encode_pulse,
    generate_synthetic,
)

ds = generate_synthetic(SyntheticConfig(n_per_class=1, noise_sigma=0.0, seed=4))
pulse = Pulse(ds.samples[0])

# Stage 1: latency code. One spike per window while the pulse stays
# above the floor; silent windows are NaN.
latency = encode_latency(pulse, theta_amp=0.01)
active = np.flatnonzero(~np.isnan(latency.times))
print(f"windows with a latency spike: {active.size} of {latency.times.size}")
print("\nwindow  amplitude  spike time")
for i in active[:6]:
    print(f"{i:6d}   {pulse.samples[i]:8.4f}  {latency.times[i]:9.4f}")

# Stage 2: Gaussian receptive fields. The bank's 25 curves tile the
# amplitude range; a window's spike lands on every dendrite whose curve
# responds above threshold, earlier the stronger the response.
bank = GrfBank()
pattern = encode_pulse(pulse, bank, theta_amp=0.01)
per_window = (~np.isnan(pattern.times)).sum(axis=0)
print(f"\ndendrites: {bank.count}")
print(f"active dendrites in window {active[0]}: {per_window[active[0]]}")
print(f"total spikes in the pattern: {int((~np.isnan(pattern.times)).sum())}")

# The text dump used by the CLI `encode` subcommand: one line per
# dendrite, one column per window, `-` marking silence.
lines = dump_pattern(pattern).splitlines()
print("\nfirst dendrite, first six windows:")
print("  " + " ".join(lines[0].split()[:6]))
print("\nA flat tail keeps hitting the same few dendrites; a falling tail")
print("sweeps across the bank. That is the signature the neuron learns.")
