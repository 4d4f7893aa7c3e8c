"""Acceptance checks, one test per numbered criterion.

Each test prints a single verdict line with the measured quantities, so
a verbose run doubles as a checklist. The two training-heavy checks
(criteria 4 and 5) sit at the end of the file; everything before them
finishes in seconds.
"""

import math
import time
from pathlib import Path

import numpy as np
import pytest

from tempotron_psd import (
    METHODS,
    AugmentConfig,
    GrfBank,
    SpikePattern,
    SyntheticConfig,
    TempotronModel,
    TrainConfig,
    classify,
    classify_batch,
    classify_by_valley,
    delta_omega,
    encode_dataset,
    encode_pulse,
    factor_series,
    generate_synthetic,
    kernel_value,
    make_kernel,
    membrane_trace,
    normalize_dataset,
    train,
)
from tempotron_psd.cli import main

# Criterion-5 experiment set: well-separated slow tails and low waveform
# noise, so the clean problem trains reliably at every augmentation level
# and the add&miss comparison is not confounded by optimization traps.
C5_GENERATOR = dict(gamma_slow_fraction=0.06, neutron_slow_fraction=0.22,
                    noise_sigma=0.005)
C5_SIGMAS = (1e-3, 3e-3, 1e-2, 3e-2, 1e-1)
C5_EPOCHS = 50


_VERDICTS: list[str] = []


@pytest.fixture(autouse=True)
def _publish_verdicts(request):
    """Route this module's verdict lines into the terminal summary."""
    request.config.acceptance_verdicts = _VERDICTS
    yield


def _verdict(name: str, ok: bool, detail: str) -> None:
    line = f"{name}: {'PASS' if ok else 'FAIL'} - {detail}"
    _VERDICTS.append(line)
    print(line)
    assert ok, f"{name}: {detail}"


def _heldout_accuracy(model, cfg: TrainConfig, test_ds) -> float:
    batch = encode_dataset(test_ds, cfg.bank(), cfg.theta_amp)
    return float(np.mean(classify_batch(model, batch) == test_ds.labels))


def test_criterion_1_kernel_peak_normalization():
    t0 = time.perf_counter()
    kernel = make_kernel(8.4, 2.1)
    grid_max = float(kernel_value(kernel, np.arange(0.0, 60.0, 0.01)).max())
    closed_form = 8.4 * 2.1 / (8.4 - 2.1) * math.log(8.4 / 2.1)
    t_peak_err = abs(kernel.t_peak - closed_form)
    elapsed = time.perf_counter() - t0
    ok = 0.9999 <= grid_max <= 1.0 and t_peak_err < 1e-6 and elapsed < 1.0
    _verdict("criterion 1", ok,
             f"kernel grid max {grid_max:.8f}, t_peak error {t_peak_err:.2e}, "
             f"{elapsed:.2f}s")


def test_criterion_2_batched_encoding_matches_sequential():
    t0 = time.perf_counter()
    ds = generate_synthetic(SyntheticConfig(n_per_class=50, seed=2))
    assert ds.samples.shape == (100, 280)
    bank = GrfBank()
    batched = encode_dataset(ds, bank, theta_amp=0.01)
    identical = 0
    for i, pulse in enumerate(ds):
        single = encode_pulse(pulse, bank, theta_amp=0.01)
        if (batched[i].times.dtype == single.times.dtype
                and np.array_equal(batched[i].times, single.times, equal_nan=True)):
            identical += 1
    elapsed = time.perf_counter() - t0
    ok = identical == len(ds) and elapsed < 10.0
    _verdict("criterion 2", ok,
             f"{identical}/{len(ds)} patterns bit-identical across the two "
             f"encoding routes, {elapsed:.1f}s")


def test_criterion_3_update_moves_peak_toward_correct_side():
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    kernel = make_kernel()
    dendrites, windows, lr = 25, 40, 1e-6
    checked = violations = 0
    while checked < 500:
        mask = rng.random((dendrites, windows)) < 0.4
        times = np.where(mask, np.arange(windows) + rng.random((dendrites, windows)),
                         np.nan)
        pattern = SpikePattern(times)
        model = TempotronModel(rng.uniform(-0.4, 0.4, dendrites), kernel)
        before = membrane_trace(model, pattern)
        if not np.any(times[np.isfinite(times)] < before.t_max):
            continue  # no spike precedes the peak: the rule has nothing to use
        wrong_label = 0 if before.fired else 1
        step = lr * delta_omega(model, pattern, wrong_label)
        after = membrane_trace(model.with_omega(model.omega + step), pattern)
        moved_up = after.v_max > before.v_max
        moved_down = after.v_max < before.v_max
        if (wrong_label == 1 and not moved_up) or (wrong_label == 0 and not moved_down):
            violations += 1
        checked += 1
    elapsed = time.perf_counter() - t0
    ok = violations == 0 and elapsed < 30.0
    _verdict("criterion 3", ok,
             f"{violations} violations in {checked} single-update cases, "
             f"{elapsed:.1f}s")


def test_criterion_6_baseline_separability():
    t0 = time.perf_counter()
    zero_ds, _ = normalize_dataset(generate_synthetic(
        SyntheticConfig(n_per_class=250, noise_sigma=0.0, seed=13)))
    moderate_ds, _ = normalize_dataset(generate_synthetic(
        SyntheticConfig(n_per_class=250, seed=14)))

    def accuracy(method, ds):
        series = classify_by_valley(factor_series(method, ds), truth=ds.labels)
        return float(np.mean(series.predicted == ds.labels))

    zero_acc = {m: accuracy(m, zero_ds) for m in METHODS}
    cc_moderate = accuracy("cc", moderate_ds)
    elapsed = time.perf_counter() - t0
    ok = (zero_acc["cc"] == 1.0
          and all(a >= 0.90 for a in zero_acc.values())
          and cc_moderate >= 0.95
          and elapsed < 60.0)
    shown = " ".join(f"{m}={a:.4f}" for m, a in zero_acc.items())
    _verdict("criterion 6", ok,
             f"zero-noise {shown}; cc moderate-noise {cc_moderate:.4f}, "
             f"{elapsed:.0f}s")


def test_criterion_7_pipeline_is_byte_deterministic(tmp_path, monkeypatch):
    artifacts = ("pulses.csv", "model.json", "log.csv", "eval.json", "pred.csv")
    runs = {}
    for tag in ("one", "two"):
        workdir = tmp_path / tag
        workdir.mkdir()
        monkeypatch.chdir(workdir)
        assert main(["generate", "--out", "pulses.csv", "--n-per-class", "30",
                     "--length", "140", "--seed", "3"]) == 0
        assert main(["train", "--dataset", "pulses.csv", "--model-out", "model.json",
                     "--log-out", "log.csv", "--epochs", "3", "--seed", "4"]) == 0
        assert main(["eval", "--model", "model.json", "--dataset", "pulses.csv",
                     "--report-out", "eval.json",
                     "--predictions-out", "pred.csv"]) == 0
        runs[tag] = {name: (workdir / name).read_bytes() for name in artifacts}
    same = [name for name in artifacts if runs["one"][name] == runs["two"][name]]
    ok = len(same) == len(artifacts)
    _verdict("criterion 7", ok,
             f"{len(same)}/{len(artifacts)} artifacts byte-identical across "
             f"two seeded generate->train->eval runs")


def test_criterion_8_batched_classification_speedup():
    ds = generate_synthetic(SyntheticConfig(n_per_class=5000, length=64, seed=15))
    bank = GrfBank()
    batch = encode_dataset(ds, bank, theta_amp=0.01)
    rng = np.random.default_rng(16)
    model = TempotronModel(rng.normal(0.0, 0.2, bank.count), make_kernel(),
                           bank=bank, theta_amp=0.01)

    t0 = time.perf_counter()
    fast = classify_batch(model, batch)
    t_batched = time.perf_counter() - t0

    sample = 200  # naive per-pattern cost is constant, so a sample extrapolates
    t0 = time.perf_counter()
    slow = [classify(model, batch[i]) for i in range(sample)]
    t_naive_total = (time.perf_counter() - t0) * (len(batch) / sample)

    agree = bool(np.array_equal(fast[:sample], np.asarray(slow)))
    speedup = t_naive_total / t_batched
    ok = agree and speedup >= 10.0
    _verdict("criterion 8", ok,
             f"batched {len(batch)} patterns in {t_batched:.2f}s vs naive "
             f"~{t_naive_total:.1f}s (x{speedup:.0f}); sample decisions "
             f"{'agree' if agree else 'DIFFER'}")


def test_criterion_4_training_converges_with_reference_settings():
    t0 = time.perf_counter()
    train_ds = generate_synthetic(SyntheticConfig(n_per_class=500, seed=11))
    test_ds, _ = normalize_dataset(generate_synthetic(
        SyntheticConfig(n_per_class=250, seed=12)))
    epochs_to_95 = {}
    heldout = {}
    for v_th in (1.0, 10.0):
        cfg = TrainConfig(epochs=300, seed=5, v_th=v_th)
        model, log = train(train_ds, cfg)
        hits = np.flatnonzero(np.asarray(log.val_loss) <= 0.05)
        epochs_to_95[v_th] = int(hits[0]) + 1 if hits.size else 10_000
        heldout[v_th] = _heldout_accuracy(model, cfg, test_ds)
    elapsed = time.perf_counter() - t0
    ok = (heldout[1.0] >= 0.95 and heldout[10.0] >= 0.95
          and epochs_to_95[10.0] <= epochs_to_95[1.0] + 50
          and elapsed < 600.0)
    _verdict("criterion 4", ok,
             f"held-out acc v_th=1: {heldout[1.0]:.4f} (0.95 at epoch "
             f"{epochs_to_95[1.0]}), v_th=10: {heldout[10.0]:.4f} (epoch "
             f"{epochs_to_95[10.0]}), {elapsed:.0f}s")


def test_criterion_5_noise_augmentation_robustness_and_dip():
    t0 = time.perf_counter()
    train_ds = generate_synthetic(
        SyntheticConfig(n_per_class=500, seed=11, **C5_GENERATOR))
    test_ds, _ = normalize_dataset(generate_synthetic(
        SyntheticConfig(n_per_class=250, seed=12, **C5_GENERATOR)))

    def accuracy(noise: AugmentConfig) -> float:
        cfg = TrainConfig(epochs=C5_EPOCHS, seed=5, noise=noise)
        model, _ = train(train_ds, cfg)
        return _heldout_accuracy(model, cfg, test_ds)

    base = accuracy(AugmentConfig())  # add&miss 1e-4 and gaussian 1e-4 baseline
    p_mid = accuracy(AugmentConfig(add_miss_p=1e-2))
    p_all = accuracy(AugmentConfig(add_miss_p=1.0))
    curve = {s: accuracy(AugmentConfig(gaussian_sigma=s)) for s in C5_SIGMAS}
    huge = accuracy(AugmentConfig(gaussian_sigma=1.0))
    elapsed = time.perf_counter() - t0

    add_miss_shift = max(abs(p_mid - base), abs(p_all - base))
    sigma_star, lowest = min(curve.items(), key=lambda kv: kv[1])
    dip_depth = min(base, huge) - lowest
    shown = " ".join(f"{s:g}:{a:.3f}" for s, a in curve.items())
    ok = add_miss_shift <= 0.03 and dip_depth >= 0.05 and elapsed < 1800.0
    _verdict("criterion 5", ok,
             f"add&miss acc {base:.4f}/{p_mid:.4f}/{p_all:.4f} (p=1e-4/1e-2/1, "
             f"max shift {add_miss_shift:.4f}, limit 0.03); gaussian accuracy "
             f"1e-4:{base:.3f} {shown} 1:{huge:.3f} -> lowest mid-range point "
             f"sigma={sigma_star:g}, depth {dip_depth:+.4f} vs required +0.05; "
             f"{elapsed:.0f}s")


_DETECTOR_DATA = Path(__file__).with_name("detector_pulses.csv")


@pytest.mark.skipif(not _DETECTOR_DATA.exists(),
                    reason="published detector dataset not present; drop a "
                           "labeled pulse CSV at tests/detector_pulses.csv to run")
def test_criterion_9_published_dataset_report():
    from tempotron_psd import load_dataset

    ds = load_dataset(_DETECTOR_DATA, has_labels=True)
    ds, skipped = normalize_dataset(ds)
    cfg = TrainConfig(epochs=300, seed=5)
    model, log = train(ds, cfg)
    accuracy = 1.0 - log.val_loss[log.best_epoch - 1]
    # Documentation-only: the bundled labels come from an upstream pipeline
    # with its own error rate, so no accuracy threshold is asserted.
    _verdict("criterion 9", 0.0 <= accuracy <= 1.0,
             f"validation accuracy {accuracy:.4f} on {len(ds)} pulses "
             f"({skipped} skipped)")
