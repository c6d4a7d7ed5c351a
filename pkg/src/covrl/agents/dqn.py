"""Deep Q-learning: epsilon-greedy exploration, replay buffer, target network."""

from __future__ import annotations

import numpy as np

from covrl.agents.mlp import Adam, Mlp


class DqnAgent:
    def __init__(self, config, obs_dim: int, action_count: int, seed: int):
        self.config = config
        self.action_count = action_count
        self.rng = np.random.default_rng(seed)
        sizes = [obs_dim, *config.hidden, action_count]
        self.qnet = Mlp(sizes, self.rng)
        self.target = Mlp(sizes, self.rng)
        self.target.copy_from(self.qnet)
        self.optim = Adam(self.qnet, config.lr)
        self.replay: list = []
        self._replay_pos = 0
        self.select_calls = 0
        self.update_calls = 0

    def epsilon(self) -> float:
        c = self.config
        frac = min(1.0, self.select_calls / c.epsilon_decay_steps)
        return c.epsilon_start + (c.epsilon_end - c.epsilon_start) * frac

    def select_action(self, obs: np.ndarray) -> int:
        eps = self.epsilon()
        self.select_calls += 1
        if self.rng.random() < eps:
            return int(self.rng.integers(0, self.action_count))
        q = self.qnet.forward(np.asarray(obs, dtype=np.float64))[0]
        return int(np.argmax(q))

    def observe(self, t) -> None:
        if len(self.replay) < self.config.replay_capacity:
            self.replay.append(t)
        else:
            self.replay[self._replay_pos] = t
            self._replay_pos = (self._replay_pos + 1) % self.config.replay_capacity

    def update(self) -> dict[str, float]:
        c = self.config
        if len(self.replay) < c.batch_size:
            return {"insufficient_data": 1.0}
        idx = self.rng.choice(len(self.replay), size=c.batch_size, replace=False)
        batch = [self.replay[i] for i in idx]
        obs = np.stack([t.obs for t in batch])
        next_obs = np.stack([t.next_obs for t in batch])
        actions = np.array([t.action for t in batch])
        rewards = np.array([t.reward for t in batch], dtype=np.float64)
        done = np.array([t.done for t in batch], dtype=np.float64)

        next_q = self.target.forward(next_obs).max(axis=1)
        targets = rewards + c.gamma * (1.0 - done) * next_q

        q = self.qnet.forward(obs)
        taken = q[np.arange(len(batch)), actions]
        td = taken - targets
        loss = float(np.mean(td ** 2))
        upstream = np.zeros_like(q)
        upstream[np.arange(len(batch)), actions] = 2.0 * td / len(batch)
        grads, _ = self.qnet.backward(upstream)
        self.optim.step(grads)

        self.update_calls += 1
        if self.update_calls % c.target_sync == 0:
            self.target.copy_from(self.qnet)
        return {"loss": loss, "epsilon": self.epsilon()}

    def networks(self) -> dict[str, Mlp]:
        return {"q": self.qnet, "target": self.target}
