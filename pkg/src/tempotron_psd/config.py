"""Flat run configuration.

Config files are plain text, one ``key = value`` per line, ``#`` for
comments. Keys are dotted (``train.epochs``, ``aug.jitter_sigma``) and
correspond one-to-one with command-line flags; a flag given on the
command line always wins over the file, which wins over the built-in
default. One global ``seed`` key feeds every random stream.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidConfig


@dataclass(frozen=True)
class Option:
    """One tunable: its config key, flag spelling, and type."""

    key: str
    type: object
    default: object = None
    help: str = ""
    required: bool = False

    @property
    def flag(self) -> str:
        return "--" + self.key.split(".", 1)[-1].replace("_", "-")

    @property
    def dest(self) -> str:
        return self.key.replace(".", "__")


def parse_bool(raw: str) -> bool:
    lowered = str(raw).strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise InvalidConfig(f"expected a boolean, got {raw!r}")


def parse_config_file(path) -> dict:
    """Read a ``key = value`` file into a raw string mapping."""
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise InvalidConfig(f"{path}:{lineno}: expected 'key = value', got {stripped!r}")
            key, _, value = stripped.partition("=")
            key = key.strip()
            value = value.strip()
            if not key:
                raise InvalidConfig(f"{path}:{lineno}: empty key")
            values[key] = value
    return values


def resolve(options: list, flags: dict, file_values: dict) -> dict:
    """Merge flag values over file values over defaults, typed.

    ``flags`` maps option dests to given values (None when absent).
    Returns {dotted key: typed value}.
    """
    out = {}
    for opt in options:
        given = flags.get(opt.dest)
        if given is not None:
            out[opt.key] = given
            continue
        if opt.key in file_values:
            raw = file_values[opt.key]
            try:
                out[opt.key] = opt.type(raw)
            except InvalidConfig:
                raise
            except (TypeError, ValueError):
                raise InvalidConfig(f"config key {opt.key}: cannot parse {raw!r}")
            continue
        if opt.required:
            raise InvalidConfig(f"missing required setting {opt.key} (flag {opt.flag})")
        out[opt.key] = opt.default
    return out


def check_known_keys(file_values: dict, known: set) -> None:
    unknown = sorted(set(file_values) - known)
    if unknown:
        raise InvalidConfig(f"unknown config keys: {', '.join(unknown)}")
