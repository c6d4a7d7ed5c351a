"""Learning policies behind one select/observe/update interface.

PPO, A2C, and DQN are implemented from scratch on the manual-backprop MLP;
`random` is the constrained-random baseline. All agents draw from their own
seeded generator, so a (config, seed) pair reproduces a trajectory bit for
bit. DQN is constructed against discrete action spaces only.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Protocol

import numpy as np

from covrl.errors import DiscreteActionRequired, InvalidHyperparameter
from covrl.agents.mlp import Adam, Mlp, mlp_backward, mlp_forward, softmax

__all__ = [
    "ActionSpace",
    "AgentConfig",
    "AgentPolicy",
    "Mlp",
    "Transition",
    "mlp_backward",
    "mlp_forward",
    "new_agent",
]


@dataclass(frozen=True)
class ActionSpace:
    kind: str  # discrete | continuous
    n: int = 0

    @classmethod
    def discrete(cls, n: int) -> "ActionSpace":
        if n < 1:
            raise InvalidHyperparameter("discrete action space needs n >= 1")
        return cls(kind="discrete", n=n)

    @classmethod
    def continuous(cls, dims: int) -> "ActionSpace":
        return cls(kind="continuous", n=dims)


@dataclass
class Transition:
    obs: np.ndarray
    action: int
    reward: int
    next_obs: np.ndarray
    done: bool


@dataclass
class AgentConfig:
    policy: str  # ppo | a2c | dqn | random
    lr: float = 3e-3
    gamma: float = 0.99
    hidden: tuple[int, ...] = (32, 32)
    # dqn
    replay_capacity: int = 2048
    batch_size: int = 64
    epsilon_start: float = 1.0
    epsilon_end: float = 0.05
    epsilon_decay_steps: int = 500
    target_sync: int = 100
    # a2c / ppo
    rollout: int = 32
    entropy_coef: float = 0.01
    value_coef: float = 0.5
    # ppo
    clip_ratio: float = 0.2
    epochs: int = 4

    def __post_init__(self):
        if self.policy not in ("ppo", "a2c", "dqn", "random"):
            raise InvalidHyperparameter(f"unknown policy {self.policy!r}")
        if self.lr <= 0:
            raise InvalidHyperparameter("lr must be > 0")
        if not 0 < self.gamma <= 1:
            raise InvalidHyperparameter("gamma must be in (0, 1]")
        if not 0 < self.clip_ratio < 1:
            raise InvalidHyperparameter("clip_ratio must be in (0, 1)")
        if self.policy == "dqn":
            if self.batch_size < 1 or self.replay_capacity < self.batch_size:
                raise InvalidHyperparameter("replay must hold at least one batch")
            if not 0 <= self.epsilon_end <= self.epsilon_start <= 1:
                raise InvalidHyperparameter("need 0 <= epsilon_end <= epsilon_start <= 1")
            if self.epsilon_decay_steps < 1 or self.target_sync < 1:
                raise InvalidHyperparameter("decay steps and target sync must be >= 1")
        if self.policy in ("a2c", "ppo"):
            if self.rollout < 1:
                raise InvalidHyperparameter("rollout must be >= 1")
            if self.entropy_coef < 0 or self.value_coef < 0:
                raise InvalidHyperparameter("coefficients must be >= 0")
        if self.policy == "ppo" and self.epochs < 1:
            raise InvalidHyperparameter("epochs must be >= 1")

    def with_overrides(self, **kwargs) -> "AgentConfig":
        return replace(self, **kwargs)


class AgentPolicy(Protocol):
    action_count: int

    def select_action(self, obs: np.ndarray) -> int: ...
    def observe(self, t: Transition) -> None: ...
    def update(self) -> dict[str, float]: ...


class RandomAgent:
    """Uniform stimulus generator; the constrained-random baseline."""

    def __init__(self, action_count: int, seed: int):
        self.action_count = action_count
        self.rng = np.random.default_rng(seed)

    def select_action(self, obs: np.ndarray) -> int:
        return int(self.rng.integers(0, self.action_count))

    def observe(self, t: Transition) -> None:
        pass

    def update(self) -> dict[str, float]:
        return {}

    def networks(self) -> dict[str, Mlp]:
        return {}


def new_agent(config: AgentConfig, obs_dim: int, action_space: ActionSpace | int,
              seed: int) -> AgentPolicy:
    if isinstance(action_space, int):
        action_space = ActionSpace.discrete(action_space)
    if config.policy == "dqn" and action_space.kind != "discrete":
        raise DiscreteActionRequired("dqn")
    if action_space.kind != "discrete":
        raise InvalidHyperparameter(
            f"continuous action spaces are out of scope for {config.policy}")
    if action_space.n < 1:
        raise InvalidHyperparameter("need at least one action")
    if config.policy == "random":
        return RandomAgent(action_space.n, seed)
    if config.policy == "dqn":
        from covrl.agents.dqn import DqnAgent
        return DqnAgent(config, obs_dim, action_space.n, seed)
    if config.policy == "a2c":
        from covrl.agents.actor_critic import A2cAgent
        return A2cAgent(config, obs_dim, action_space.n, seed)
    from covrl.agents.actor_critic import PpoAgent
    return PpoAgent(config, obs_dim, action_space.n, seed)
