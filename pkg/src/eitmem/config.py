"""Scenario files: strict YAML/JSON loading and validation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np
import yaml

from .units import ParameterError

COMMANDS = ("spectrum", "slowlight", "store", "fwm", "fit")
TOP_KEYS = {"name", "command", "mode", "params", "sweep", "outputs", "seed", "jobs", "description", "figure",
            "metadata"}
SWEEP_KEYS = {"variable", "values", "start", "stop", "num", "spacing"}


class ConfigError(ParameterError):
    pass


@dataclass
class Sweep:
    variable: str
    values: list

    @classmethod
    def from_dict(cls, d: dict) -> "Sweep":
        _reject_unknown(d, SWEEP_KEYS, "sweep")
        if "variable" not in d:
            raise ConfigError("sweep.variable", "missing")
        if "values" in d:
            if any(k in d for k in ("start", "stop", "num", "spacing")):
                raise ConfigError("sweep", "give either values or start/stop/num, not both")
            values = [float(v) for v in d["values"]]
        else:
            for k in ("start", "stop", "num"):
                if k not in d:
                    raise ConfigError(f"sweep.{k}", "missing")
            num = int(d["num"])
            spacing = d.get("spacing", "linear")
            if spacing == "linear":
                values = np.linspace(float(d["start"]), float(d["stop"]), num).tolist() if num > 0 else []
            elif spacing == "log":
                if float(d["start"]) <= 0 or float(d["stop"]) <= 0:
                    raise ConfigError("sweep.start", "log spacing needs positive bounds")
                values = np.geomspace(float(d["start"]), float(d["stop"]), num).tolist() if num > 0 else []
            else:
                raise ConfigError("sweep.spacing", "must be 'linear' or 'log'")
        if not values:
            raise ConfigError("sweep", "sweep range is empty")
        return cls(str(d["variable"]), values)


@dataclass
class Scenario:
    name: str
    command: str
    mode: Optional[str] = None
    params: dict = field(default_factory=dict)
    sweep: Optional[Sweep] = None
    outputs: dict = field(default_factory=dict)
    seed: int = 0
    jobs: int = 1
    description: str = ""
    figure: str = ""
    metadata: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        if not isinstance(d, dict):
            raise ConfigError("config", "top level must be a mapping")
        _reject_unknown(d, TOP_KEYS, "")
        if "command" not in d:
            raise ConfigError("command", "missing")
        if d["command"] not in COMMANDS:
            raise ConfigError("command", f"unknown command {d['command']!r}; choose from {', '.join(COMMANDS)}")
        params = d.get("params") or {}
        if not isinstance(params, dict):
            raise ConfigError("params", "must be a mapping")
        sweep = d.get("sweep")
        if sweep is not None:
            if not isinstance(sweep, dict):
                raise ConfigError("sweep", "must be a mapping")
            sweep = Sweep.from_dict(sweep)
        seed = d.get("seed", 0)
        jobs = d.get("jobs", 1)
        if not isinstance(seed, int) or isinstance(seed, bool):
            raise ConfigError("seed", "must be an integer")
        if not isinstance(jobs, int) or jobs < 1:
            raise ConfigError("jobs", "must be a positive integer")
        return cls(
            name=str(d.get("name", d["command"])), command=d["command"], mode=d.get("mode"),
            params=dict(params), sweep=sweep, outputs=dict(d.get("outputs") or {}), seed=seed, jobs=jobs,
            description=str(d.get("description", "")), figure=str(d.get("figure", "")),
            metadata=dict(d.get("metadata") or {}),
        )

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"name": self.name, "command": self.command, "mode": self.mode,
                               "params": self.params, "seed": self.seed, "jobs": self.jobs}
        if self.sweep is not None:
            out["sweep"] = {"variable": self.sweep.variable, "values": self.sweep.values}
        if self.figure:
            out["figure"] = self.figure
        if self.metadata:
            out["metadata"] = self.metadata
        return out


def _reject_unknown(d: dict, allowed: set, where: str):
    for k in d:
        if k not in allowed:
            path = f"{where}.{k}" if where else str(k)
            raise ConfigError(path, f"unknown key; allowed: {', '.join(sorted(allowed))}")


def load_config(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from exc
    try:
        if path.suffix.lower() == ".json":
            data = json.loads(text)
        else:
            data = yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError("config", f"cannot parse {path}: {exc}") from exc
    return Scenario.from_dict(data)
