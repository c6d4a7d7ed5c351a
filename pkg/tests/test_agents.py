"""MLP gradients, agent behaviors, seed determinism, checkpoints."""

import numpy as np
import pytest

from covrl.agents import ActionSpace, AgentConfig, Transition, new_agent
from covrl.agents.actor_critic import A2cAgent, PpoAgent
from covrl.agents.checkpoint import load_checkpoint, save_checkpoint
from covrl.agents.dqn import DqnAgent
from covrl.agents.mlp import Adam, Mlp, mlp_backward, mlp_forward, softmax
from covrl.errors import DiscreteActionRequired, InvalidHyperparameter, ShapeMismatch


def finite_difference_grads(net: Mlp, x: np.ndarray, loss_fn, h=1e-5):
    """Central differences on every parameter for loss_fn(net.forward(x))."""
    grads = []
    for layer in range(len(net.weights)):
        for param in (net.weights[layer], net.biases[layer]):
            grad = np.zeros_like(param)
            it = np.nditer(param, flags=["multi_index"])
            while not it.finished:
                idx = it.multi_index
                saved = param[idx]
                param[idx] = saved + h
                up = loss_fn(net.forward(x))
                param[idx] = saved - h
                down = loss_fn(net.forward(x))
                param[idx] = saved
                grad[idx] = (up - down) / (2 * h)
                it.iternext()
            grads.append(grad)
    return grads


def relative_error(analytic, numeric):
    scale = max(abs(analytic), abs(numeric), 1e-8)
    return abs(analytic - numeric) / scale


# --- mlp ---

def test_single_linear_layer_is_exact():
    rng = np.random.default_rng(0)
    net = Mlp([3, 2], rng)
    x = rng.normal(size=(4, 3))
    y = net.forward(x)
    assert np.allclose(y, x @ net.weights[0] + net.biases[0])


def test_gradient_check_against_finite_differences():
    rng = np.random.default_rng(42)
    for case in range(10):
        sizes = [int(rng.integers(1, 5)) for _ in range(int(rng.integers(2, 4)))]
        sizes = [max(s, 1) for s in sizes]
        net = Mlp(sizes, rng)
        x = rng.normal(size=(3, sizes[0]))
        target = rng.normal(size=(3, sizes[-1]))

        def loss_fn(y):
            return float(np.mean((y - target) ** 2))

        y = net.forward(x)
        upstream = 2.0 * (y - target) / y.size
        analytic, _ = net.backward(upstream)
        numeric = finite_difference_grads(net, x, loss_fn)
        flat_a = np.concatenate([g.ravel() for pair in analytic for g in pair])
        flat_n = np.concatenate([g.ravel() for g in numeric])
        worst = max(relative_error(a, b) for a, b in zip(flat_a, flat_n))
        assert worst < 1e-4


def test_zero_upstream_gives_zero_grads():
    net = Mlp([3, 4, 2], np.random.default_rng(1))
    net.forward(np.zeros((2, 3)))
    grads, dx = net.backward(np.zeros((2, 2)))
    assert all(np.all(dw == 0) and np.all(db == 0) for dw, db in grads)
    assert np.all(dx == 0)


def test_shape_validation():
    net = Mlp([3, 2], np.random.default_rng(2))
    with pytest.raises(ShapeMismatch):
        net.forward(np.zeros((1, 4)))
    net.forward(np.zeros((2, 3)))
    with pytest.raises(ShapeMismatch):
        net.backward(np.zeros((2, 3)))
    with pytest.raises(ShapeMismatch):
        Mlp([3], np.random.default_rng(0))


def test_module_level_ops_match_methods():
    net = Mlp([2, 3], np.random.default_rng(5))
    x = np.ones((1, 2))
    assert np.array_equal(mlp_forward(net, x), net.forward(x))
    grads = mlp_backward(net, np.ones((1, 3)))
    assert len(grads) == 1


def test_init_is_seed_deterministic_and_bounded():
    a = Mlp([4, 8, 2], np.random.default_rng(9))
    b = Mlp([4, 8, 2], np.random.default_rng(9))
    for wa, wb in zip(a.weights, b.weights):
        assert np.array_equal(wa, wb)
    assert np.all(np.abs(a.weights[0]) <= 1 / np.sqrt(4))
    assert np.all(np.abs(a.weights[1]) <= 1 / np.sqrt(8))


# --- agent construction ---

def test_config_validation():
    with pytest.raises(InvalidHyperparameter):
        AgentConfig(policy="dqn", lr=0)
    with pytest.raises(InvalidHyperparameter):
        AgentConfig(policy="ppo", gamma=1.5)
    with pytest.raises(InvalidHyperparameter):
        AgentConfig(policy="ppo", clip_ratio=1.0)
    with pytest.raises(InvalidHyperparameter):
        AgentConfig(policy="dqn", replay_capacity=8, batch_size=64)
    with pytest.raises(InvalidHyperparameter):
        AgentConfig(policy="sac")


def test_dqn_requires_discrete_actions():
    config = AgentConfig(policy="dqn")
    with pytest.raises(DiscreteActionRequired):
        new_agent(config, obs_dim=1, action_space=ActionSpace.continuous(2), seed=0)
    agent = new_agent(config, obs_dim=1, action_space=ActionSpace.discrete(8), seed=0)
    assert agent.qnet.out_dim == 8


def test_continuous_out_of_scope_for_all_policies():
    for policy in ("ppo", "a2c"):
        with pytest.raises(InvalidHyperparameter):
            new_agent(AgentConfig(policy=policy), 1,
                      ActionSpace.continuous(1), seed=0)


def test_same_seed_same_weights():
    config = AgentConfig(policy="dqn")
    a = new_agent(config, 1, 8, seed=33)
    b = new_agent(config, 1, 8, seed=33)
    for wa, wb in zip(a.qnet.weights, b.qnet.weights):
        assert np.array_equal(wa, wb)


# --- behavior ---

def test_random_agent_is_uniform_within_one_percent():
    agent = new_agent(AgentConfig(policy="random"), 1, 8, seed=1)
    draws = 80_000
    counts = np.zeros(8)
    obs = np.zeros(1)
    for _ in range(draws):
        counts[agent.select_action(obs)] += 1
    freqs = counts / draws
    assert np.all(np.abs(freqs - 0.125) < 0.01)


def test_random_agent_observe_update_are_noops():
    agent = new_agent(AgentConfig(policy="random"), 1, 4, seed=0)
    t = Transition(np.zeros(1), 0, 1, np.zeros(1), False)
    agent.observe(t)
    assert agent.update() == {}


def test_dqn_greedy_argmax_when_epsilon_zero():
    config = AgentConfig(policy="dqn", epsilon_start=0.0, epsilon_end=0.0)
    agent = new_agent(config, 1, 3, seed=0)
    obs = np.array([0.5])
    q = agent.qnet.forward(obs)[0]
    assert agent.select_action(obs) == int(np.argmax(q))


def test_epsilon_schedule_monotone_then_constant():
    config = AgentConfig(policy="dqn", epsilon_start=1.0, epsilon_end=0.05,
                         epsilon_decay_steps=100)
    agent = new_agent(config, 1, 2, seed=0)
    values = []
    for _ in range(150):
        values.append(agent.epsilon())
        agent.select_calls += 1
    assert all(a >= b for a, b in zip(values, values[1:]))
    assert values[0] == 1.0
    assert abs(values[-1] - 0.05) < 1e-12


def test_replay_ring_evicts_oldest():
    config = AgentConfig(policy="dqn", replay_capacity=4, batch_size=2)
    agent = new_agent(config, 1, 2, seed=0)
    for i in range(6):
        agent.observe(Transition(np.array([float(i)]), 0, 0, np.array([0.0]), False))
    stored = sorted(t.obs[0] for t in agent.replay)
    assert stored == [2.0, 3.0, 4.0, 5.0]


def test_dqn_gamma_zero_fixed_batch_loss_decreases():
    config = AgentConfig(policy="dqn", gamma=1e-9, lr=1e-2, batch_size=4,
                         replay_capacity=8, epsilon_start=0, epsilon_end=0)
    agent = new_agent(config, 1, 2, seed=7)
    t = Transition(np.array([0.3]), 1, 1, np.array([0.3]), False)
    for _ in range(4):
        agent.observe(t)
    losses = [agent.update()["loss"] for _ in range(50)]
    assert losses[-1] < losses[0]
    assert losses[-1] < 0.01  # TD target collapses to r = 1
    q = agent.qnet.forward(np.array([0.3]))[0]
    assert abs(q[1] - 1.0) < 0.2


def test_dqn_insufficient_data_is_reported_noop():
    agent = new_agent(AgentConfig(policy="dqn", batch_size=64), 1, 2, seed=0)
    before = [w.copy() for w in agent.qnet.weights]
    assert agent.update() == {"insufficient_data": 1.0}
    for w0, w1 in zip(before, agent.qnet.weights):
        assert np.array_equal(w0, w1)


def test_rollout_not_ready_then_ready():
    config = AgentConfig(policy="a2c", rollout=3)
    agent = new_agent(config, 1, 2, seed=0)
    t = Transition(np.zeros(1), 0, 0, np.zeros(1), False)
    agent.select_action(np.zeros(1))
    agent.observe(t)
    assert agent.update() == {"insufficient_data": 1.0}
    for _ in range(2):
        agent.select_action(np.zeros(1))
        agent.observe(t)
    metrics = agent.update()
    assert "policy_loss" in metrics
    assert agent.buffer == []


def test_a2c_discounted_returns_hand_case():
    config = AgentConfig(policy="a2c", gamma=0.5, rollout=3)
    agent: A2cAgent = new_agent(config, 1, 2, seed=0)
    rewards = [1, 1, 1]
    for i, r in enumerate(rewards):
        agent.select_action(np.array([0.0]))
        agent.observe(Transition(np.array([0.0]), 0, r, np.array([0.0]),
                                 done=(i == 2)))
    _, _, _, returns = agent._returns()
    assert np.allclose(returns, [1.75, 1.5, 1.0])


def test_ppo_identity_ratio_makes_surrogates_equal():
    config = AgentConfig(policy="ppo", rollout=4, epochs=1, entropy_coef=0.0)
    agent: PpoAgent = new_agent(config, 1, 3, seed=0)
    for i in range(4):
        obs = np.array([i / 4])
        action = agent.select_action(obs)
        agent.observe(Transition(obs, action, 1, np.array([(i + 1) / 4]), i == 3))
    obs, actions, _, returns = agent._returns()
    logp_old = np.array([entry[1] for entry in agent.buffer])
    logits = agent.policy.forward(obs)
    p = softmax(logits)
    logp = np.log(p + 1e-12)[np.arange(4), actions]
    ratio = np.exp(logp - logp_old)
    assert np.allclose(ratio, 1.0)
    adv = returns - agent.value.forward(obs)[:, 0]
    assert np.allclose(np.minimum(ratio * adv,
                                  np.clip(ratio, 0.8, 1.2) * adv), ratio * adv)


def test_ppo_clipped_samples_get_zero_policy_gradient():
    # synthetic check of the surrogate derivative selector
    clip = 0.2
    for adv, ratio in [(1.0, 1.5), (-1.0, 0.5)]:
        surr1 = ratio * adv
        surr2 = np.clip(ratio, 1 - clip, 1 + clip) * adv
        active = surr1 <= surr2
        assert not active  # outside the trust region, pushing further out
    for adv, ratio in [(1.0, 0.9), (-1.0, 1.1), (1.0, 1.0)]:
        surr1 = ratio * adv
        surr2 = np.clip(ratio, 1 - clip, 1 + clip) * adv
        assert surr1 <= surr2  # gradient flows


def test_actor_critic_policy_gradient_matches_finite_difference():
    config = AgentConfig(policy="a2c", rollout=4, entropy_coef=0.05, gamma=0.9)
    agent: A2cAgent = new_agent(config, 2, 3, seed=12)
    rng = np.random.default_rng(3)
    for i in range(4):
        obs = rng.normal(size=2)
        action = agent.select_action(obs)
        agent.observe(Transition(obs, action, int(rng.integers(-1, 2)),
                                 rng.normal(size=2), i == 3))
    obs, actions, _, returns = agent._returns()
    values = agent.value.forward(obs)[:, 0]
    adv = returns - values
    batch = len(actions)

    def loss_of_policy() -> float:
        logits = agent.policy.forward(obs)
        p = softmax(logits)
        logp = np.log(p + 1e-12)
        taken = logp[np.arange(batch), actions]
        entropy = -(p * logp).sum(axis=1).mean()
        return float(-(taken * adv).mean() - config.entropy_coef * entropy)

    logits = agent.policy.forward(obs)
    p = softmax(logits)
    logp = np.log(p + 1e-12)
    onehot = np.zeros_like(p)
    onehot[np.arange(batch), actions] = 1.0
    dlogits = ((p - onehot) * adv[:, None]
               + config.entropy_coef * agent._entropy_grad(p, logp)) / batch
    analytic, _ = agent.policy.backward(dlogits)

    h = 1e-6
    for layer in range(len(agent.policy.weights)):
        w = agent.policy.weights[layer]
        for idx in [(0, 0), (0, w.shape[1] - 1)]:
            saved = w[idx]
            w[idx] = saved + h
            up = loss_of_policy()
            w[idx] = saved - h
            down = loss_of_policy()
            w[idx] = saved
            numeric = (up - down) / (2 * h)
            assert relative_error(analytic[layer][0][idx], numeric) < 1e-4


def test_full_trajectory_is_seed_reproducible():
    def run():
        config = AgentConfig(policy="ppo", rollout=4)
        agent = new_agent(config, 1, 4, seed=21)
        rng = np.random.default_rng(0)
        actions = []
        obs = np.array([0.0])
        for i in range(40):
            a = agent.select_action(obs)
            actions.append(a)
            nxt = np.array([float(rng.random())])
            agent.observe(Transition(obs, a, int(rng.integers(-1, 2)), nxt, False))
            agent.update()
            obs = nxt
        return actions
    assert run() == run()


def test_checkpoint_round_trip(tmp_path):
    config = AgentConfig(policy="a2c")
    agent = new_agent(config, 2, 4, seed=5)
    path = tmp_path / "weights.bin"
    save_checkpoint(agent, path)
    other = new_agent(config, 2, 4, seed=99)
    assert not np.array_equal(other.policy.weights[0], agent.policy.weights[0])
    load_checkpoint(other, path)
    for wa, wb in zip(agent.policy.weights, other.policy.weights):
        assert np.array_equal(wa, wb)
    for wa, wb in zip(agent.value.weights, other.value.weights):
        assert np.array_equal(wa, wb)


def test_checkpoint_shape_mismatch_rejected(tmp_path):
    agent = new_agent(AgentConfig(policy="a2c"), 2, 4, seed=5)
    path = tmp_path / "weights.bin"
    save_checkpoint(agent, path)
    smaller = new_agent(AgentConfig(policy="a2c", hidden=(8,)), 2, 4, seed=5)
    with pytest.raises(ShapeMismatch):
        load_checkpoint(smaller, path)
