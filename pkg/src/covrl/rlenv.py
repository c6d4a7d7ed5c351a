"""Gym-style environment over a coverage-instrumented backend.

The observation is the configured coverage type's fraction (optionally
augmented with per-type fractions and a one-hot of the last action). Actions
are a flat enumeration of all bit combinations over the configured action
ports. Reward follows the optimistic/penalty scheme: strictly increased
coverage earns +1, otherwise penalty gives -1 and optimistic gives 0.
Episodes end at the coverage target or the step budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from covrl.errors import (
    ActionSpaceTooLarge,
    ClockAsActionPort,
    ConfigError,
    EmptyPortSet,
    EpisodeFinished,
    IndexOutOfRange,
    UnknownPort,
)
from covrl.hdl.design import DesignIR
from covrl.hdl.ports import PortSpec, PortSpecSet
from covrl.sim.bits import BitVector
from covrl.sim.coverage import CoverageSnapshot, coverage_score
from covrl.sim.simulator import SimInstance

ACTION_SPACE_CAP = 1 << 20

COVERAGE_CHOICES = ("block", "fsm", "toggle", "expression", "code")
POLICY_CHOICES = ("ppo", "a2c", "dqn", "random")
SCHEME_CHOICES = ("optimistic", "penalty")

CONFIG_KEYS = (
    "top_module", "coverage_type", "learning_policy", "ports",
    "reward_scheme", "max_steps", "seed", "target_percent",
)


@dataclass
class EnvConfig:
    top_module: str
    coverage_type: str
    learning_policy: str
    ports: list[str]
    reward_scheme: str
    max_steps: int = 1000
    seed: int = 0
    target_percent: Fraction = Fraction(100)
    augmented_observation: bool = False
    fill_policy: str = "zero"  # zero | random, for non-action data inputs

    def __post_init__(self):
        if self.coverage_type not in COVERAGE_CHOICES:
            raise ConfigError(f"coverage_type must be one of {COVERAGE_CHOICES}")
        if self.learning_policy not in POLICY_CHOICES:
            raise ConfigError(f"learning_policy must be one of {POLICY_CHOICES}")
        if self.reward_scheme not in SCHEME_CHOICES:
            raise ConfigError(f"reward_scheme must be one of {SCHEME_CHOICES}")
        if self.fill_policy not in ("zero", "random"):
            raise ConfigError("fill_policy must be zero or random")
        if self.max_steps < 1:
            raise ConfigError("max_steps must be positive")
        self.target_percent = Fraction(self.target_percent)
        if not 0 < self.target_percent <= 100:
            raise ConfigError("target_percent must be in (0, 100]")


def parse_env_config(text: str) -> EnvConfig:
    """Key-value config: one `key = value` per line, ports comma-separated."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value.strip()
    for required in ("top_module", "coverage_type", "learning_policy", "ports", "reward_scheme"):
        if required not in raw:
            raise ConfigError(f"missing required key {required!r}")
    kwargs: dict = {
        "top_module": raw["top_module"],
        "coverage_type": raw["coverage_type"],
        "learning_policy": raw["learning_policy"],
        "ports": [p.strip() for p in raw["ports"].split(",") if p.strip()],
        "reward_scheme": raw["reward_scheme"],
    }
    if "max_steps" in raw:
        kwargs["max_steps"] = int(raw["max_steps"])
    if "seed" in raw:
        kwargs["seed"] = int(raw["seed"])
    if "target_percent" in raw:
        kwargs["target_percent"] = Fraction(raw["target_percent"])
    return EnvConfig(**kwargs)


def format_env_config(config: EnvConfig) -> str:
    lines = [
        f"top_module = {config.top_module}",
        f"coverage_type = {config.coverage_type}",
        f"learning_policy = {config.learning_policy}",
        f"ports = {', '.join(config.ports)}",
        f"reward_scheme = {config.reward_scheme}",
        f"max_steps = {config.max_steps}",
        f"seed = {config.seed}",
        f"target_percent = {config.target_percent}",
    ]
    return "\n".join(lines) + "\n"


# --- action codec -----------------------------------------------------------

def action_space_size(ports: list[PortSpec]) -> int:
    return 1 << sum(p.width for p in ports)


def decode_action(index: int, ports: list[PortSpec]) -> dict[str, BitVector]:
    """Split the index's binary expansion MSB-first across the ports in order."""
    total = sum(p.width for p in ports)
    if not 0 <= index < (1 << total):
        raise IndexOutOfRange(index, 1 << total)
    bits = format(index, f"0{total}b")
    out: dict[str, BitVector] = {}
    offset = 0
    for port in ports:
        out[port.name] = BitVector.from_bits(bits[offset:offset + port.width])
        offset += port.width
    return out


def encode_action(values: Mapping[str, BitVector], ports: list[PortSpec]) -> int:
    bits = "".join(values[p.name].bits for p in ports)
    return int(bits, 2)


def compute_reward(prev, curr, scheme: str) -> int:
    if curr > prev:
        return 1
    if scheme == "penalty":
        return -1
    if scheme == "optimistic":
        return 0
    raise ConfigError(f"unknown reward scheme {scheme!r}")


# --- observation / step result ----------------------------------------------

@dataclass
class Observation:
    coverage: Fraction  # configured type, as a fraction in [0, 1]
    vector: np.ndarray = field(repr=False, default=None)


@dataclass
class StepResult:
    observation: Observation
    reward: int
    done: bool
    info: dict


# --- backends ----------------------------------------------------------------

class SimBackend:
    """Embedded backend: an elaborated SimInstance plus its port spec."""

    def __init__(self, sim: SimInstance, ports: PortSpecSet):
        self.sim = sim
        self.ports = ports
        self.last_snapshot: CoverageSnapshot | None = None

    def reset(self) -> None:
        self.sim.reset()
        self.last_snapshot = None

    def step(self, inputs: dict[str, BitVector]) -> CoverageSnapshot:
        _, snapshot = self.sim.step(inputs)
        self.last_snapshot = snapshot
        return snapshot

    def score(self, coverage_type: str) -> Fraction:
        return coverage_score(self.sim.db, coverage_type)

    @property
    def cycle(self) -> int:
        return self.sim.cycle


def make_backend(ir: DesignIR, ports: PortSpecSet, record_trace: bool = False) -> SimBackend:
    return SimBackend(SimInstance(ir, record_trace=record_trace), ports)


# --- environment --------------------------------------------------------------

class StimulusEnv:
    def __init__(self, config: EnvConfig, backend: SimBackend):
        ports = backend.ports
        if not ports.inputs:
            raise EmptyPortSet(ports.design_name)
        if not config.ports:
            raise EmptyPortSet(ports.design_name)
        self.action_ports: list[PortSpec] = []
        for name in config.ports:
            try:
                spec = ports.get(name)
            except UnknownPort:
                raise UnknownPort(name, f"action port {name!r} not in design "
                                        f"{ports.design_name!r}") from None
            if spec.role == "clock":
                raise ClockAsActionPort(name)
            if spec.direction != "input":
                raise UnknownPort(name, f"action port {name!r} is not an input")
            self.action_ports.append(spec)
        size = action_space_size(self.action_ports)
        if size > ACTION_SPACE_CAP:
            raise ActionSpaceTooLarge(size, ACTION_SPACE_CAP)
        self.config = config
        self.backend = backend
        self.action_count = size
        self._fill_rng = np.random.default_rng(config.seed)
        self._last_action = -1
        self.steps = 0
        self.done = False
        self.prev_score = Fraction(0)

    @property
    def observation_dim(self) -> int:
        if self.config.augmented_observation:
            return 5 + self.action_count
        return 1

    def _observe(self) -> Observation:
        frac = self.backend.score(self.config.coverage_type) / 100
        if not self.config.augmented_observation:
            return Observation(coverage=frac, vector=np.array([float(frac)]))
        parts = [float(frac)]
        for t in ("block", "toggle", "fsm", "expression"):
            parts.append(float(self.backend.score(t) / 100))
        onehot = np.zeros(self.action_count)
        if self._last_action >= 0:
            onehot[self._last_action] = 1.0
        return Observation(coverage=frac,
                           vector=np.concatenate([np.array(parts), onehot]))

    def _reset_inputs(self) -> dict[str, BitVector]:
        inputs: dict[str, BitVector] = {}
        for port in self.backend.ports.inputs:
            if port.role == "clock":
                continue
            if port.role == "reset":
                inputs[port.name] = BitVector(port.width, 0 if port.active_low else 1)
            else:
                inputs[port.name] = BitVector(port.width, 0)
        return inputs

    def reset(self) -> Observation:
        """Zero the backend and step one cycle with reset asserted."""
        self.backend.reset()
        self.backend.step(self._reset_inputs())
        self.steps = 0
        self.done = False
        self._last_action = -1
        self._fill_rng = np.random.default_rng(self.config.seed)
        self.prev_score = self.backend.score(self.config.coverage_type)
        self.done = self.prev_score >= self.config.target_percent
        return self._observe()

    def _step_inputs(self, action: int) -> dict[str, BitVector]:
        inputs = decode_action(action, self.action_ports)
        for port in self.backend.ports.inputs:
            if port.name in inputs or port.role == "clock":
                continue
            if port.role == "reset":
                inputs[port.name] = BitVector(port.width, 1 if port.active_low else 0)
            elif self.config.fill_policy == "random":
                value = int(self._fill_rng.integers(0, 1 << port.width))
                inputs[port.name] = BitVector(port.width, value)
            else:
                inputs[port.name] = BitVector(port.width, 0)
        return inputs

    def step(self, action: int) -> StepResult:
        if self.done:
            raise EpisodeFinished()
        if not 0 <= action < self.action_count:
            raise IndexOutOfRange(action, self.action_count)
        snapshot = self.backend.step(self._step_inputs(action))
        self._last_action = action
        curr = self.backend.score(self.config.coverage_type)
        reward = compute_reward(self.prev_score, curr, self.config.reward_scheme)
        self.steps += 1
        self.done = curr >= self.config.target_percent or self.steps >= self.config.max_steps
        info = {
            "cycle": self.backend.cycle,
            "raw_score": curr,
            "new_items": len(snapshot.new_items),
        }
        self.prev_score = curr
        return StepResult(observation=self._observe(), reward=reward,
                          done=self.done, info=info)


def make_env(config: EnvConfig, backend: SimBackend) -> StimulusEnv:
    return StimulusEnv(config, backend)
