"""Scenario configuration: YAML files plus command-line overrides.

A config names one scenario and overrides a subset of its published
parameters; unknown keys are rejected against the scenario's parameter
schema so typos fail loudly instead of silently running defaults.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml


class ConfigError(ValueError):
    """Malformed configuration or unknown scenario/parameter keys."""


@dataclass
class ScenarioConfig:
    scenario: str
    overrides: dict = field(default_factory=dict)
    master_seed: int = 0
    out_dir: str = "runs"
    threads: int = 1

    def resolved(self, defaults: dict) -> dict:
        params = dict(defaults)
        unknown = set(self.overrides) - set(defaults)
        if unknown:
            raise ConfigError(
                f"unknown parameter keys for scenario {self.scenario!r}: "
                f"{sorted(unknown)}; known keys: {sorted(defaults)}")
        for key, value in self.overrides.items():
            params[key] = _coerce_like(defaults[key], value, key)
        return params


def _coerce_like(reference, value, key: str):
    """Cast an override to the default's type (bool/int/float/str/list)."""
    if isinstance(reference, bool):
        if isinstance(value, bool):
            return value
        if str(value).lower() in ("true", "1", "yes"):
            return True
        if str(value).lower() in ("false", "0", "no"):
            return False
        raise ConfigError(f"cannot read {value!r} as a boolean for {key!r}")
    if isinstance(reference, int) and not isinstance(reference, bool):
        try:
            as_float = float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"cannot read {value!r} as an integer for {key!r}") from None
        if as_float != int(as_float):
            raise ConfigError(f"{key!r} expects an integer, got {value!r}")
        return int(as_float)
    if isinstance(reference, float):
        try:
            return float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"cannot read {value!r} as a number for {key!r}") from None
    if isinstance(reference, (list, tuple)):
        if isinstance(value, str):
            parts = [p for p in value.split(",") if p != ""]
            elem = reference[0] if reference else 0.0
            return [_coerce_like(elem, p, key) for p in parts]
        return list(value)
    return value


def load_config(path: str | Path) -> ScenarioConfig:
    """Read a YAML config file: {scenario, seed, out_dir, threads, params}."""
    raw = yaml.safe_load(Path(path).read_text())
    if not isinstance(raw, dict) or "scenario" not in raw:
        raise ConfigError(f"config file {path} must be a mapping with a 'scenario' key")
    known = {"scenario", "seed", "out_dir", "threads", "params"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown top-level config keys: {sorted(unknown)}")
    params = raw.get("params") or {}
    if not isinstance(params, dict):
        raise ConfigError("'params' must be a mapping")
    return ScenarioConfig(scenario=str(raw["scenario"]), overrides=params,
                          master_seed=int(raw.get("seed", 0)),
                          out_dir=str(raw.get("out_dir", "runs")),
                          threads=int(raw.get("threads", 1)))


def parse_set_overrides(pairs) -> dict:
    """--set key=value pairs into an override mapping (values stay strings
    until they are coerced against the scenario defaults)."""
    out = {}
    for pair in pairs or ():
        if "=" not in pair:
            raise ConfigError(f"--set expects key=value, got {pair!r}")
        key, value = pair.split("=", 1)
        out[key.strip()] = value.strip()
    return out
