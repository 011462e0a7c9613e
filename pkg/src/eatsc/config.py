"""Run configuration: defaults, flat key=value config files, flag overrides.

Config files are plain text, one ``key = value`` per line, ``#`` comments.
Keys mirror the training-parameter names (see README for the full table).
Command-line flags take precedence over file values, which take precedence
over the built-in defaults.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

from .agents import TrainParams
from .simulate import ScenarioConfig


@dataclass
class RunConfig:
    """Everything one experiment run needs."""

    variant: str = "eatsc"
    # training hyperparameters
    max_episode: int = 150
    max_simulation_seconds: int = 10000
    memory_size: int = 500
    minibatch_size: int = 32
    target_update_period: int = 40
    greedy_decrement: float = 0.008
    min_greedy: float = 0.02
    reward_decay: float = 0.95
    learning_rate: float = 0.005
    prioritization_alpha: float = 0.6
    prioritization_beta: float = 0.4
    beta_anneal_iters: int = 0  # 0 = derive from the episode budget
    train_gate_records: int = 0  # 0 = wait for a full memory
    hidden_units: int = 20
    # scenario
    flow_mean_ew: float = 300.0
    flow_std_ew: float = 30.0
    flow_mean_ns: float = 600.0
    flow_std_ns: float = 60.0
    queue_capacity: int = 110
    saturation_headway: float = 2.0
    # fixed-policy knobs
    fixed_green: int = 30
    fixed_rate_ew: float = 0.1
    fixed_rate_ns: float = 0.1
    # harness
    replications: int = 1
    base_seed: int = 1

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.base_seed < 0:
            raise ValueError("base_seed must be >= 0")

    def scenario(self) -> ScenarioConfig:
        return ScenarioConfig.paired(
            self.flow_mean_ew,
            self.flow_std_ew,
            self.flow_mean_ns,
            self.flow_std_ns,
            max_sim_time=self.max_simulation_seconds,
            capacity=self.queue_capacity,
            saturation_headway=self.saturation_headway,
            seed=self.base_seed,
        )

    def train_params(self) -> TrainParams:
        anneal = self.beta_anneal_iters
        if anneal <= 0:
            # one training iteration per decision, ~35 s mean green
            anneal = math.ceil(self.max_episode * self.max_simulation_seconds / 35)
        return TrainParams(
            gamma=self.reward_decay,
            learning_rate=self.learning_rate,
            batch_size=self.minibatch_size,
            target_update_period=self.target_update_period,
            greedy_decrement=self.greedy_decrement,
            min_greedy=self.min_greedy,
            memory_size=self.memory_size,
            alpha=self.prioritization_alpha,
            beta_start=self.prioritization_beta,
            beta_anneal_iters=anneal,
            train_gate_records=self.train_gate_records,
            n_hidden=self.hidden_units,
        )

    def fixed_rates(self) -> tuple[float, float]:
        return (self.fixed_rate_ew, self.fixed_rate_ns)

    def echo(self) -> dict:
        """Resolved configuration as an ordered key -> string map."""
        out = {}
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            out[f.name] = repr(value) if isinstance(value, float) else str(value)
        return out


_FIELDS = {f.name: f.type for f in dataclasses.fields(RunConfig)}
_CONVERTERS = {"int": int, "float": float, "str": str}


def parse_config_file(path) -> dict:
    """Parse a flat key=value config file into typed values."""
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw.rstrip()!r}")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key not in _FIELDS:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
            try:
                values[key] = _CONVERTERS[_FIELDS[key]](value)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    return values


def load_config(path=None, overrides: dict | None = None) -> RunConfig:
    """Defaults <- config file <- explicit overrides."""
    values = {}
    if path is not None:
        values.update(parse_config_file(path))
    if overrides:
        for key, value in overrides.items():
            if key not in _FIELDS:
                raise ValueError(f"unknown config key {key!r}")
            values[key] = _CONVERTERS[_FIELDS[key]](value)
    return RunConfig(**values)
