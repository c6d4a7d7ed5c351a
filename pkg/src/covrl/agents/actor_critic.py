"""On-policy actor-critic agents: A2C (one pass) and PPO (clipped surrogate).

Both keep a separate policy and value MLP, collect fixed-length rollouts, and
compute n-step discounted returns bootstrapped from the value of the last
next-observation. Gradients through the softmax head are computed manually.
"""

from __future__ import annotations

import numpy as np

from covrl.agents.mlp import Adam, Mlp, softmax


class _RolloutAgent:
    def __init__(self, config, obs_dim: int, action_count: int, seed: int):
        self.config = config
        self.action_count = action_count
        self.rng = np.random.default_rng(seed)
        self.policy = Mlp([obs_dim, *config.hidden, action_count], self.rng)
        self.value = Mlp([obs_dim, *config.hidden, 1], self.rng)
        self.policy_optim = Adam(self.policy, config.lr)
        self.value_optim = Adam(self.value, config.lr)
        self.buffer: list = []
        self._pending_logp: float | None = None

    def _probs(self, obs: np.ndarray) -> np.ndarray:
        logits = self.policy.forward(np.asarray(obs, dtype=np.float64))[0]
        return softmax(logits)

    def select_action(self, obs: np.ndarray) -> int:
        p = self._probs(obs)
        u = self.rng.random()
        action = int(min(np.searchsorted(np.cumsum(p), u, side="right"),
                         self.action_count - 1))
        self._pending_logp = float(np.log(p[action] + 1e-12))
        return action

    def observe(self, t) -> None:
        logp = self._pending_logp
        if logp is None:
            logp = float(np.log(self._probs(t.obs)[t.action] + 1e-12))
        self._pending_logp = None
        self.buffer.append((t, logp))

    def ready(self) -> bool:
        if not self.buffer:
            return False
        return len(self.buffer) >= self.config.rollout or self.buffer[-1][0].done

    def _returns(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        ts = [entry[0] for entry in self.buffer]
        obs = np.stack([t.obs for t in ts])
        actions = np.array([t.action for t in ts])
        rewards = np.array([t.reward for t in ts], dtype=np.float64)
        last = ts[-1]
        bootstrap = 0.0
        if not last.done:
            bootstrap = float(self.value.forward(
                np.asarray(last.next_obs, dtype=np.float64))[0, 0])
        returns = np.zeros(len(ts))
        acc = bootstrap
        for i in range(len(ts) - 1, -1, -1):
            acc = rewards[i] + self.config.gamma * acc
            returns[i] = acc
        return obs, actions, rewards, returns

    def _entropy_grad(self, p: np.ndarray, logp: np.ndarray) -> np.ndarray:
        ent = -(p * logp).sum(axis=1, keepdims=True)
        return p * (logp + ent)

    def _value_step(self, obs: np.ndarray, returns: np.ndarray) -> float:
        v = self.value.forward(obs)[:, 0]
        err = v - returns
        loss = float(np.mean(err ** 2))
        upstream = (2.0 * self.config.value_coef * err / len(err))[:, None]
        grads, _ = self.value.backward(upstream)
        self.value_optim.step(grads)
        return loss

    def networks(self) -> dict[str, Mlp]:
        return {"policy": self.policy, "value": self.value}


class A2cAgent(_RolloutAgent):
    def update(self) -> dict[str, float]:
        if not self.ready():
            return {"insufficient_data": 1.0}
        obs, actions, _, returns = self._returns()
        batch = len(actions)

        values = self.value.forward(obs)[:, 0]
        adv = returns - values

        logits = self.policy.forward(obs)
        p = softmax(logits)
        logp = np.log(p + 1e-12)
        onehot = np.zeros_like(p)
        onehot[np.arange(batch), actions] = 1.0
        taken_logp = logp[np.arange(batch), actions]
        entropy = float(-(p * logp).sum(axis=1).mean())
        policy_loss = float(-(taken_logp * adv).mean()) - self.config.entropy_coef * entropy

        dlogits = ((p - onehot) * adv[:, None]
                   + self.config.entropy_coef * self._entropy_grad(p, logp)) / batch
        grads, _ = self.policy.backward(dlogits)
        self.policy_optim.step(grads)

        value_loss = self._value_step(obs, returns)
        self.buffer.clear()
        return {"policy_loss": policy_loss, "value_loss": value_loss, "entropy": entropy}


class PpoAgent(_RolloutAgent):
    def update(self) -> dict[str, float]:
        if not self.ready():
            return {"insufficient_data": 1.0}
        obs, actions, _, returns = self._returns()
        logp_old = np.array([entry[1] for entry in self.buffer])
        batch = len(actions)

        values = self.value.forward(obs)[:, 0]
        # raw advantages: with short rollouts, mean-centering would erase the
        # uniform negative signal that drives exploration on dry stretches
        adv = returns - values

        clip = self.config.clip_ratio
        last: dict[str, float] = {}
        for _ in range(self.config.epochs):
            logits = self.policy.forward(obs)
            p = softmax(logits)
            logp = np.log(p + 1e-12)
            taken_logp = logp[np.arange(batch), actions]
            ratio = np.exp(taken_logp - logp_old)
            surr1 = ratio * adv
            surr2 = np.clip(ratio, 1.0 - clip, 1.0 + clip) * adv
            policy_loss = float(-np.minimum(surr1, surr2).mean())
            entropy = float(-(p * logp).sum(axis=1).mean())

            active = (surr1 <= surr2).astype(np.float64)  # clipped samples get zero grad
            onehot = np.zeros_like(p)
            onehot[np.arange(batch), actions] = 1.0
            coeff = -(active * adv * ratio)[:, None]
            dlogits = (coeff * (onehot - p)
                       + self.config.entropy_coef * self._entropy_grad(p, logp)) / batch
            grads, _ = self.policy.backward(dlogits)
            self.policy_optim.step(grads)

            value_loss = self._value_step(obs, returns)
            last = {"policy_loss": policy_loss, "value_loss": value_loss,
                    "entropy": entropy, "ratio_mean": float(ratio.mean())}
        self.buffer.clear()
        return last
