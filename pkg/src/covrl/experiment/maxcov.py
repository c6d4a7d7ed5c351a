"""Empirical maximum-coverage probes.

Small action spaces (<= 4096) get an ordered exhaustive cycle through every
action plus the seeded random probes; larger spaces are probed with seeded
random stimuli only. The record keeps the supremum score observed. Coverage
can be sequence-dependent (toggles, FSM walks), which is why the random
probes run even when the space is exhaustively enumerable.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from covrl.corpus import CorpusEntry, load_design
from covrl.rlenv import StimulusEnv, make_backend
from covrl.sim.coverage import format_percent

EXHAUSTIVE_LIMIT = 4096


@dataclass
class MaxCoverageRecord:
    design: str
    coverage_type: str
    percent: Fraction
    budget: int
    method: str
    seeds: int

    @property
    def percent_text(self) -> str:
        return format_percent(self.percent.numerator, 100 * self.percent.denominator)


def _fresh_env(entry: CorpusEntry, coverage_type: str, budget: int, seed: int) -> StimulusEnv:
    config = replace(entry.env_config, coverage_type=coverage_type,
                     max_steps=budget, seed=seed,
                     target_percent=Fraction(100))
    return StimulusEnv(config, make_backend(entry.ir, entry.ports))


def _probe_exhaustive(entry: CorpusEntry, coverage_type: str, budget: int) -> Fraction:
    env = _fresh_env(entry, coverage_type, budget, seed=0)
    env.reset()
    step = 0
    best = env.prev_score
    while not env.done and step < budget:
        result = env.step(step % env.action_count)
        best = result.info["raw_score"]
        step += 1
    return best


def _probe_random(entry: CorpusEntry, coverage_type: str, budget: int, seed: int) -> Fraction:
    env = _fresh_env(entry, coverage_type, budget, seed=seed)
    env.reset()
    rng = np.random.default_rng(seed)
    best = env.prev_score
    while not env.done:
        result = env.step(int(rng.integers(0, env.action_count)))
        best = result.info["raw_score"]
    return best


def find_max_coverage(design: str | CorpusEntry, coverage_type: str,
                      budget: int, seeds: int = 3) -> MaxCoverageRecord:
    if budget < 1:
        raise ValueError("budget must be >= 1")
    entry = design if isinstance(design, CorpusEntry) else load_design(design)
    probe_env = _fresh_env(entry, coverage_type, budget, seed=0)
    scores: list[Fraction] = []
    if probe_env.action_count <= EXHAUSTIVE_LIMIT:
        method = "exhaustive+random"
        scores.append(_probe_exhaustive(entry, coverage_type, budget))
    else:
        method = "random"
    for seed in range(seeds):
        scores.append(_probe_random(entry, coverage_type, budget, seed))
    return MaxCoverageRecord(design=entry.name, coverage_type=coverage_type,
                             percent=max(scores), budget=budget,
                             method=method, seeds=seeds)
