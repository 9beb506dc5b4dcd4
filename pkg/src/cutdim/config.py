"""Run configuration with file, environment, and flag layering.

Precedence, lowest to highest: built-in defaults, config file (JSON),
CUTDIM_* environment variables, explicit overrides (CLI flags).  Every
field can come from any layer; unknown keys in a config file are
rejected so typos do not silently fall back to defaults.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass
from typing import Mapping, Optional

from .rational import rat

ENV_PREFIX = "CUTDIM_"


@dataclass
class RunConfig:
    tolerance: object = rat(1, 10000)  # cut classification slack
    hull_time_budget: float = 600.0  # seconds per affine hull run
    face_time_budget: float = 600.0  # seconds per face dimension run
    solve_time_limit: float = 60.0  # seconds per oracle / impact solve
    solve_node_limit: Optional[int] = None  # nodes per oracle solve
    impact_node_limit: Optional[int] = None  # cap on the shared node budget
    jobs: int = 1  # concurrent cut analyses
    output: Optional[str] = None  # report path; None prints to stdout
    output_format: str = "json"  # json | csv
    engine: str = "solver"  # solver | lattice
    verify_oracle: bool = True  # recheck every oracle answer
    seed: int = 2024  # generator seed for the selftest suites

    def validate(self) -> None:
        if rat(self.tolerance) < 0:
            raise ValueError("tolerance must be nonnegative")
        for name in ("hull_time_budget", "face_time_budget", "solve_time_limit"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ValueError(f"{name} must be positive")
        for name in ("solve_node_limit", "impact_node_limit"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ValueError(f"{name} must be at least 1")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")
        if self.output_format not in ("json", "csv"):
            raise ValueError(f"unknown output format {self.output_format!r}")
        if self.engine not in ("solver", "lattice"):
            raise ValueError(f"unknown engine {self.engine!r}")


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}


def _coerce(name: str, raw):
    """Parse one field from text (env var or JSON scalar)."""
    if isinstance(raw, str):
        raw = raw.strip()
    if name == "tolerance":
        return rat(raw)
    if name in ("hull_time_budget", "face_time_budget", "solve_time_limit"):
        if raw in (None, "", "none"):
            return None
        return float(raw)
    if name in ("solve_node_limit", "impact_node_limit"):
        if raw in (None, "", "none"):
            return None
        return int(raw)
    if name in ("jobs", "seed"):
        return int(raw)
    if name == "verify_oracle":
        if isinstance(raw, bool):
            return raw
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"cannot read {raw!r} as a boolean")
    if name == "output":
        return raw or None
    return raw


def load_config(
    path: Optional[str] = None,
    env: Optional[Mapping[str, str]] = None,
    overrides: Optional[Mapping[str, object]] = None,
) -> RunConfig:
    """Build a validated RunConfig from the three layers."""
    cfg = RunConfig()

    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}: not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise ValueError(f"{path}: config must be a JSON object")
        for key, value in doc.items():
            if key not in _FIELDS:
                raise ValueError(f"{path}: unknown config key {key!r}")
            try:
                setattr(cfg, key, _coerce(key, value))
            except (ValueError, TypeError) as exc:
                raise ValueError(f"{path}: {key}: {exc}") from exc

    env = os.environ if env is None else env
    for name in _FIELDS:
        var = ENV_PREFIX + name.upper()
        if var in env:
            try:
                setattr(cfg, name, _coerce(name, env[var]))
            except (ValueError, TypeError) as exc:
                raise ValueError(f"{var}: {exc}") from exc

    if overrides:
        for key, value in overrides.items():
            if key not in _FIELDS:
                raise ValueError(f"unknown config field {key!r}")
            if value is not None:
                setattr(cfg, key, value)

    cfg.validate()
    return cfg
