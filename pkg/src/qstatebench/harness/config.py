"""Experiment configuration files (YAML or JSON) and their canonical echo."""

from __future__ import annotations

import dataclasses
import hashlib
import json
from pathlib import Path
from typing import Any

import yaml

from qstatebench.errors import ConfigError, ConstraintError, InvalidInputError
from qstatebench.harness.experiments import ExperimentSpec
from qstatebench.harness.runner import RUNNERS, resolve_config
from qstatebench.problem import ProblemSpec
from qstatebench.qubit import PhysicsConfig, QubitState, state_from_angles

_TUPLE_KEYS = {
    "algorithms": str,
    "n_values": int,
    "panel_n": int,
    "levels": int,
    "restricted_levels": int,
    "jmax_values": float,
    "s1_n": int,
    "s1_checkpoints": int,
    "phi_values": float,
    "noise_levels": float,
}
_SCALAR_KEYS = {
    "runs": int,
    "n_iter": int,
    "seed": int,
    "workers": int,
    "n_pieces": int,
    "noise_realizations": int,
}
_PROBLEM_KEYS = {"h", "total_time", "initial", "target"}


def load_file(path: str | Path) -> dict:
    """Parse a YAML (or JSON, which YAML accepts) mapping."""
    try:
        text = Path(path).read_text()
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return data


def _state(value: Any, key: str) -> QubitState:
    if not isinstance(value, dict) or set(value) - {"theta", "phi"}:
        raise ConfigError(f"problem.{key} must be a mapping with keys theta, phi")
    return state_from_angles(float(value.get("theta", 0.0)), float(value.get("phi", 0.0)))


def _problem(block: Any) -> ProblemSpec:
    if not isinstance(block, dict):
        raise ConfigError("problem must be a mapping")
    unknown = set(block) - _PROBLEM_KEYS
    if unknown:
        raise ConfigError(f"unknown problem keys: {sorted(unknown)}")
    base = ProblemSpec()
    physics = PhysicsConfig(
        h=float(block.get("h", base.physics.h)),
        total_time=float(block.get("total_time", base.physics.total_time)),
    )
    initial = _state(block["initial"], "initial") if "initial" in block else base.initial
    target = _state(block["target"], "target") if "target" in block else base.target
    return ProblemSpec(initial, target, physics)


def _algorithm_config(name: str, block: Any):
    if not isinstance(block, dict):
        raise ConfigError(f"{name} must be a mapping")
    cfg_type = RUNNERS[name][1]
    known = {f.name for f in dataclasses.fields(cfg_type)}
    unknown = set(block) - known
    if unknown:
        raise ConfigError(f"unknown {name} keys: {sorted(unknown)}")
    try:
        return cfg_type(**block)
    except TypeError as exc:
        raise ConfigError(f"{name}: {exc}") from None


def build_spec(data: dict, **overrides) -> ExperimentSpec:
    """ExperimentSpec from a config mapping; non-None ``overrides`` win."""
    data = dict(data)
    for k, v in overrides.items():
        if v is not None:
            data[k] = v
    kwargs: dict[str, Any] = {}
    configs = {}
    for key, value in data.items():
        try:
            if key in _TUPLE_KEYS:
                if isinstance(value, (str, int, float)):
                    value = [value]
                kwargs[key] = tuple(_TUPLE_KEYS[key](v) for v in value)
            elif key in _SCALAR_KEYS:
                kwargs["master_seed" if key == "seed" else key] = _SCALAR_KEYS[key](value)
            elif key == "problem":
                kwargs["problem"] = _problem(value)
            elif key in RUNNERS:
                configs[key] = _algorithm_config(key, value)
            else:
                raise ConfigError(f"unknown config key {key!r}")
        except (TypeError, ValueError, InvalidInputError, ConstraintError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"{key}: {exc}") from None
    try:
        return ExperimentSpec(configs=configs, **kwargs)
    except (InvalidInputError, ConstraintError) as exc:
        raise ConfigError(str(exc)) from None


def _state_echo(s: QubitState) -> list[list[float]]:
    return [[s.amp0.real, s.amp0.imag], [s.amp1.real, s.amp1.imag]]


def spec_echo(spec: ExperimentSpec) -> dict:
    """Every field of ``spec`` as plain JSON types, algorithm configs resolved
    to their full field set."""
    echo: dict[str, Any] = {}
    for f in dataclasses.fields(spec):
        if f.name in ("problem", "configs"):
            continue
        v = getattr(spec, f.name)
        echo[f.name] = list(v) if isinstance(v, tuple) else v
    p = spec.problem
    echo["problem"] = {
        "h": p.physics.h,
        "total_time": p.physics.total_time,
        "initial": _state_echo(p.initial),
        "target": _state_echo(p.target),
    }
    echo["configs"] = {
        a: _jsonable(dataclasses.asdict(resolve_config(a, spec.configs.get(a))))
        for a in spec.algorithms
    }
    return echo


def _jsonable(d: dict) -> dict:
    return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}


def config_hash(echo: dict) -> str:
    blob = json.dumps(echo, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()
