"""Config files, option resolution, and runtime helpers."""

import numpy as np
import pytest

from tempotron_psd.config import Option, parse_bool, parse_config_file, resolve
from tempotron_psd.errors import InvalidConfig
from tempotron_psd.runtime import worker_count, worker_map
from tempotron_psd.seeding import rng_stream

# --- options ---------------------------------------------------------------------


def test_option_flag_and_dest_spellings():
    opt = Option("train.lr_high", float, 1e-3)
    assert opt.flag == "--lr-high"
    assert opt.dest == "train__lr_high"
    assert Option("seed", int, 0).flag == "--seed"


def test_parse_bool():
    for raw in ("1", "true", "Yes", "ON"):
        assert parse_bool(raw) is True
    for raw in ("0", "false", "No", "off"):
        assert parse_bool(raw) is False
    with pytest.raises(InvalidConfig):
        parse_bool("maybe")


# --- config files -------------------------------------------------------------------


def test_parse_config_file(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text(
        """
# training setup
train.epochs = 10
seed=4

aug.mode = off
"""
    )
    values = parse_config_file(path)
    assert values == {"train.epochs": "10", "seed": "4", "aug.mode": "off"}


def test_parse_config_file_reports_line_numbers(tmp_path):
    path = tmp_path / "bad.conf"
    path.write_text("train.epochs = 10\nnot a setting\n")
    with pytest.raises(InvalidConfig) as err:
        parse_config_file(path)
    assert ":2:" in str(err.value)


def test_parse_config_file_rejects_empty_key(tmp_path):
    path = tmp_path / "bad.conf"
    path.write_text("= 10\n")
    with pytest.raises(InvalidConfig):
        parse_config_file(path)


# --- resolution ---------------------------------------------------------------------


OPTS = [
    Option("train.epochs", int, 300),
    Option("train.lr_high", float, 1e-3),
    Option("data.path", str, required=True),
]


def test_flag_beats_file_beats_default():
    out = resolve(
        OPTS,
        flags={"train__epochs": 5, "train__lr_high": None, "data__path": "x.csv"},
        file_values={"train.epochs": "99", "train.lr_high": "0.5"},
    )
    assert out["train.epochs"] == 5  # flag wins
    assert out["train.lr_high"] == 0.5  # file wins over default
    assert out["data.path"] == "x.csv"


def test_defaults_apply_when_nothing_given():
    out = resolve(OPTS[:2], flags={}, file_values={})
    assert out == {"train.epochs": 300, "train.lr_high": 1e-3}


def test_missing_required_setting_raises():
    with pytest.raises(InvalidConfig) as err:
        resolve(OPTS, flags={}, file_values={})
    assert "data.path" in str(err.value)


def test_unparseable_file_value_raises():
    with pytest.raises(InvalidConfig) as err:
        resolve(OPTS, flags={"data__path": "x"}, file_values={"train.epochs": "soon"})
    assert "train.epochs" in str(err.value)


# --- seeding ----------------------------------------------------------------------------


def test_rng_streams_are_stable_and_distinct():
    a1 = rng_stream(7, "shuffle").uniform(size=4)
    a2 = rng_stream(7, "shuffle").uniform(size=4)
    b = rng_stream(7, "init").uniform(size=4)
    c = rng_stream(8, "shuffle").uniform(size=4)
    assert np.array_equal(a1, a2)
    assert not np.array_equal(a1, b)
    assert not np.array_equal(a1, c)


# --- worker pool --------------------------------------------------------------------------


def test_worker_map_preserves_order_and_values():
    data = np.arange(2000, dtype=np.float64).reshape(2, 1000)

    def double(chunk):
        return chunk * 2

    parts = worker_map(double, data, axis=1, chunk=64)
    joined = np.concatenate(parts, axis=1)
    assert np.array_equal(joined, data * 2)


def test_worker_map_single_chunk_when_small():
    data = np.ones((3, 10))
    parts = worker_map(lambda c: c, data, axis=1, chunk=512)
    assert len(parts) == 1


def test_worker_count_env(monkeypatch):
    monkeypatch.delenv("TEMPOTRON_THREADS", raising=False)
    assert worker_count() == 1
    monkeypatch.setenv("TEMPOTRON_THREADS", "4")
    assert worker_count() == 4
    monkeypatch.setenv("TEMPOTRON_THREADS", "zero")
    with pytest.raises(InvalidConfig):
        worker_count()
    monkeypatch.setenv("TEMPOTRON_THREADS", "0")
    with pytest.raises(InvalidConfig):
        worker_count()


def test_worker_map_parallel_results_match_serial(monkeypatch):
    data = np.arange(3000, dtype=np.float64).reshape(3, 1000)

    def stat(chunk):
        return chunk.cumsum(axis=1)

    monkeypatch.delenv("TEMPOTRON_THREADS", raising=False)
    serial = np.concatenate(worker_map(stat, data, axis=1, chunk=128), axis=1)
    monkeypatch.setenv("TEMPOTRON_THREADS", "4")
    threaded = np.concatenate(worker_map(stat, data, axis=1, chunk=128), axis=1)
    assert np.array_equal(serial, threaded)
