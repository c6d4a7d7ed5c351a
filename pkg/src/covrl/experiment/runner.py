"""One online episode: agent drives the env until target coverage or budget."""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from fractions import Fraction

from covrl.agents import AgentConfig, Transition, new_agent
from covrl.corpus import CorpusEntry, load_design
from covrl.experiment.maxcov import MaxCoverageRecord
from covrl.rlenv import EnvConfig, StimulusEnv, make_backend


def default_agent_config(policy: str) -> AgentConfig:
    return AgentConfig(policy=policy)


def acceptance_agent_config(policy: str) -> AgentConfig:
    """Per-policy settings used by the tap_fsm directional experiment.

    Small nets, fast learning rates, and entropy floors high enough to keep
    the softmax policies from saturating: the agent has to adapt within a
    single episode from a low-dimensional observation.
    """
    if policy == "dqn":
        return AgentConfig(policy="dqn", lr=0.05, gamma=0.9, hidden=(16,),
                           batch_size=16, replay_capacity=128,
                           epsilon_start=1.0, epsilon_end=0.1,
                           epsilon_decay_steps=100, target_sync=20)
    if policy == "ppo":
        return AgentConfig(policy="ppo", lr=0.02, gamma=0.9, hidden=(16,),
                           rollout=8, entropy_coef=0.06)
    if policy == "a2c":
        return AgentConfig(policy="a2c", lr=0.05, gamma=0.9, hidden=(16,),
                           rollout=8, entropy_coef=0.1)
    return AgentConfig(policy=policy)


@dataclass
class RunRecord:
    design: str
    policy: str
    scheme: str
    seed: int
    max_percent: Fraction
    stimuli_to_max: int | None  # None when censored at the budget
    trajectory: list[tuple[int, Fraction]] = field(default_factory=list)
    rewards_sum: int = 0
    steps: int = 0
    wall_time: float = 0.0
    coverage_dump: list[str] | None = None  # per-cycle CSV lines, on request
    value_trace: list[str] | None = None

    @property
    def censored(self) -> bool:
        return self.stimuli_to_max is None


def run_one(design: str | CorpusEntry, env_config: EnvConfig,
            agent_config: AgentConfig, max_record: MaxCoverageRecord,
            collect_dump: bool = False, collect_trace: bool = False) -> RunRecord:
    entry = design if isinstance(design, CorpusEntry) else load_design(design)
    config = replace(env_config, target_percent=max_record.percent,
                     coverage_type=max_record.coverage_type)
    backend = make_backend(entry.ir, entry.ports, record_trace=collect_trace)
    env = StimulusEnv(config, backend)
    agent = new_agent(agent_config, env.observation_dim, env.action_count,
                      seed=config.seed)

    started = time.perf_counter()
    obs = env.reset()
    dump: list[str] | None = [backend.last_snapshot.csv_line()] if collect_dump else None
    trajectory: list[tuple[int, Fraction]] = [(0, env.prev_score)]
    stimuli_to_max = 0 if env.prev_score >= max_record.percent else None
    rewards_sum = 0
    step = 0
    while not env.done:
        action = agent.select_action(obs.vector)
        result = env.step(action)
        step += 1
        agent.observe(Transition(obs=obs.vector, action=action,
                                 reward=result.reward,
                                 next_obs=result.observation.vector,
                                 done=result.done))
        agent.update()
        score = result.info["raw_score"]
        trajectory.append((step, score))
        if dump is not None:
            dump.append(backend.last_snapshot.csv_line())
        if result.reward > 0:
            rewards_sum += 1
        if stimuli_to_max is None and score >= max_record.percent:
            stimuli_to_max = step
        obs = result.observation
    trace = None
    if collect_trace:
        trace = ["cycle,signal,value"]
        trace += [f"{c},{n},{v}" for c, n, v in backend.sim.trace]
    return RunRecord(
        design=entry.name,
        policy=config.learning_policy,
        scheme=config.reward_scheme,
        seed=config.seed,
        max_percent=max_record.percent,
        stimuli_to_max=stimuli_to_max,
        trajectory=trajectory,
        rewards_sum=rewards_sum,
        steps=step,
        wall_time=time.perf_counter() - started,
        coverage_dump=dump,
        value_trace=trace,
    )
