"""Run configuration: defaults, a key=value file, and command-line overrides."""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

CONFIG_ENV = "BORELFORGE_CONFIG"

MAX_DEPTH = 8
MAX_FANOUT = 16
MIN_BIT_BUDGET = 1 << 10


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    depth: int = 2
    fanout: int = 4
    seed: int = 0
    bit_budget: int = 1 << 20
    trials: int = 1000
    m_max: int = 3
    horizon: int = 500
    out_path: str = ""
    format: str = "json"

    def __post_init__(self):
        if not 0 <= self.depth <= MAX_DEPTH:
            raise ConfigError(f"depth must be in [0, {MAX_DEPTH}], got {self.depth}")
        if not 1 <= self.fanout <= MAX_FANOUT:
            raise ConfigError(f"fanout must be in [1, {MAX_FANOUT}], got {self.fanout}")
        if self.bit_budget < MIN_BIT_BUDGET:
            raise ConfigError(f"bit_budget must be at least {MIN_BIT_BUDGET}")
        if self.format != "json":
            raise ConfigError("format must be json")

    def to_json(self) -> dict:
        return asdict(self)

    def with_overrides(self, **overrides) -> "RunConfig":
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


def parse_config_text(text: str) -> dict:
    types = {f.name: f.type for f in fields(RunConfig)}
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in types:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        out[key] = value if types[key] == "str" else int(value)
    return out


def load_config(path: str | os.PathLike | None = None, **overrides) -> RunConfig:
    """Defaults, then the file (``path`` or $BORELFORGE_CONFIG), then overrides."""
    path = path or os.environ.get(CONFIG_ENV)
    values = {}
    if path:
        values = parse_config_text(Path(path).read_text())
    return RunConfig(**values).with_overrides(**overrides)
