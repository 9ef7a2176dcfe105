"""Experiment configuration: defaults, nested-mapping overrides, and YAML loading.

The same mapping schema is accepted from a YAML config file and from the
environment protocol's reset overrides, so one documented format drives both.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .engine import SimulationConfig
from .errors import ConfigError
from .fairness import WeightPolicy
from .market import MnoConfig, default_mno_configs
from .sensing import FlightConfig, SensingConfig

_POLICY_KEYS = {"kind", "update_period", "weight_floor"}
_MARKET_KEYS = {"demand_mean", "value_range", "participation_prob", "shares", "demand_rates", "revenue_rates"}
_SENSING_KEYS = {
    "total_bandwidth", "block_bandwidth", "energy_threshold", "vote_threshold",
    "uavs_per_mno", "snr_db", "noise_power", "activity", "perfect", "flight",
}
_FLIGHT_KEYS = {"altitude", "radius", "speed", "sensing_angle", "decision_angle"}
_TOP_KEYS = {"mnos", "auctions", "seeds", "policy", "market", "sensing", "out"}


@dataclass
class ExperimentConfig:
    """A simulation setup plus the seeds to run it under and an output target."""

    simulation: SimulationConfig
    seeds: list[int] = field(default_factory=lambda: [1])
    output: str | None = None


def _require_keys(mapping: dict, allowed: set, where: str) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"unknown {where} keys: {sorted(unknown)}")


def _build_flight(mapping: dict) -> FlightConfig:
    _require_keys(mapping, _FLIGHT_KEYS, "flight")
    flight = FlightConfig()
    for key, value in mapping.items():
        setattr(flight, key, float(value))
    return flight


def _build_sensing(mapping: dict, num_mnos: int) -> SensingConfig:
    _require_keys(mapping, _SENSING_KEYS, "sensing")
    sensing = SensingConfig(num_mnos=num_mnos)
    for key, value in mapping.items():
        if key == "flight":
            sensing.flight = _build_flight(value or {})
        elif key == "perfect":
            sensing.perfect_sensing = bool(value)
        elif key == "vote_threshold":
            sensing.vote_threshold = int(value)
        elif key == "uavs_per_mno":
            sensing.num_uavs_per_mno = int(value)
        elif key == "activity":
            sensing.incumbent_activity = float(value)
        else:
            setattr(sensing, key, float(value))
    return sensing


def _build_mnos(mapping: dict, num_mnos: int) -> tuple[list[MnoConfig], tuple[float, float]]:
    _require_keys(mapping, _MARKET_KEYS, "market")
    value_range = tuple(float(v) for v in mapping.get("value_range", (1.0, 1.1)))
    if len(value_range) != 2:
        raise ConfigError("value_range must hold exactly [low, high]")
    configs = default_mno_configs(
        num_mnos,
        demand_mean=float(mapping.get("demand_mean", 6.0)),
        value_range=value_range,
        participation_prob=float(mapping.get("participation_prob", 1.0)),
    )
    for key, attr in (("shares", "market_share"), ("demand_rates", "demand_rate"), ("revenue_rates", "revenue_rate")):
        values = mapping.get(key)
        if values is None:
            continue
        if len(values) != num_mnos:
            raise ConfigError(f"{key} must list {num_mnos} values")
        for cfg, v in zip(configs, values):
            setattr(cfg, attr, float(v))
    return configs, value_range


def _build_policy(mapping: dict) -> WeightPolicy:
    _require_keys(mapping, _POLICY_KEYS, "policy")
    policy = WeightPolicy()
    if "kind" in mapping:
        policy.kind = str(mapping["kind"])
    if "update_period" in mapping:
        policy.update_period = int(mapping["update_period"])
    if "weight_floor" in mapping:
        policy.weight_floor = float(mapping["weight_floor"])
    return policy


def build_experiment(mapping: dict | None) -> ExperimentConfig:
    """Turn a nested mapping (parsed YAML or reset overrides) into a validated config."""
    mapping = dict(mapping or {})
    if not isinstance(mapping, dict):
        raise ConfigError("config root must be a mapping")
    _require_keys(mapping, _TOP_KEYS, "top-level")
    try:
        num_mnos = int(mapping.get("mnos", 5))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"mnos must be an integer: {exc}") from None
    if num_mnos < 1:
        raise ConfigError("mnos must be >= 1")
    try:
        mno_configs, value_range = _build_mnos(mapping.get("market") or {}, num_mnos)
        sensing = _build_sensing(mapping.get("sensing") or {}, num_mnos)
        policy = _build_policy(mapping.get("policy") or {})
        auctions = int(mapping.get("auctions", 2000))
        seeds = [int(s) for s in mapping.get("seeds", [1])]
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"malformed config value: {exc}") from None
    if not seeds:
        raise ConfigError("seeds must list at least one seed")
    simulation = SimulationConfig(
        mnos=mno_configs,
        sensing=sensing,
        policy=policy,
        value_range=value_range,
        episode_length=auctions,
    )
    simulation.validate()
    out = mapping.get("out")
    return ExperimentConfig(simulation=simulation, seeds=seeds, output=None if out is None else str(out))


def load_config(path: str | Path) -> ExperimentConfig:
    """Load and validate a YAML experiment config file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    try:
        mapping = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config file {path} is not valid YAML: {exc}") from None
    if mapping is None:
        mapping = {}
    if not isinstance(mapping, dict):
        raise ConfigError("config root must be a mapping")
    return build_experiment(mapping)
