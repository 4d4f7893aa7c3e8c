"""Shared fixtures: small deterministic datasets and encoded batches."""

import numpy as np
import pytest

import tempotron_psd as tp


def pytest_configure(config):
    # verdict lines from the acceptance tests, echoed after the run
    config.acceptance_verdicts = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "acceptance_verdicts", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def small_config() -> tp.SyntheticConfig:
    """20 pulses per class, short records, moderate noise."""
    return tp.SyntheticConfig(n_per_class=20, length=140, seed=7)


@pytest.fixture(scope="session")
def small_dataset(small_config) -> tp.Dataset:
    return tp.generate_synthetic(small_config)


@pytest.fixture(scope="session")
def clean_dataset() -> tp.Dataset:
    """Zero noise, zero jitter: two exactly repeated waveforms."""
    cfg = tp.SyntheticConfig(n_per_class=10, length=140, noise_sigma=0.0, amplitude_jitter=0.0, seed=3)
    return tp.generate_synthetic(cfg)


@pytest.fixture(scope="session")
def bank() -> tp.GrfBank:
    return tp.GrfBank()


@pytest.fixture(scope="session")
def small_batch(small_dataset, bank) -> tp.SpikePatternBatch:
    return tp.encode_dataset(small_dataset, bank)


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
