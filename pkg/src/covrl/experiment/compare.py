"""RL-vs-random comparison tables and trajectory dumps.

`build_comparison` produces `summary.csv` (one row per design, median
stimuli-to-max per policy and scheme over paired seeds), `maxcov.csv`, and
one trajectory CSV per run, all as in-memory text; `compare` writes them to
a directory. Output is byte-stable for fixed designs, seeds, and configs;
censored cells render as `>max_steps`.
"""

from __future__ import annotations

import math
from dataclasses import replace
from pathlib import Path

from covrl.corpus import CorpusEntry, load_design
from covrl.experiment.maxcov import MaxCoverageRecord, find_max_coverage
from covrl.experiment.runner import RunRecord, default_agent_config, run_one
from covrl.sim.coverage import format_percent

POLICY_ORDER = ("ppo", "a2c", "dqn")
SCHEME_ORDER = ("optimistic", "penalty")
SUMMARY_COLUMNS = (
    "design", "max_coverage", "random",
    "ppo_optimistic", "ppo_penalty",
    "a2c_optimistic", "a2c_penalty",
    "dqn_optimistic", "dqn_penalty",
)

DEFAULT_PROBE_BUDGET = 4096


def run_matrix(entry: CorpusEntry, combos: list[tuple[str, str]], seeds: list[int],
               max_record: MaxCoverageRecord,
               agent_config_for=default_agent_config,
               max_steps: int | None = None,
               augmented_observation: bool | None = None) -> dict:
    """RunRecords for every (policy, scheme, seed), plus the random baseline."""
    records: dict[tuple[str, str, int], RunRecord] = {}
    base = entry.env_config
    if max_steps is not None:
        base = replace(base, max_steps=max_steps)
    if augmented_observation is not None:
        base = replace(base, augmented_observation=augmented_observation)
    for seed in seeds:
        config = replace(base, learning_policy="random", reward_scheme="optimistic",
                         seed=seed)
        records[("random", "none", seed)] = run_one(
            entry, config, agent_config_for("random"), max_record)
    for policy, scheme in combos:
        for seed in seeds:
            config = replace(base, learning_policy=policy, reward_scheme=scheme,
                             seed=seed)
            records[(policy, scheme, seed)] = run_one(
                entry, config, agent_config_for(policy), max_record)
    return records


def median_steps(records: list[RunRecord]) -> float:
    values = sorted(math.inf if r.censored else r.stimuli_to_max for r in records)
    n = len(values)
    mid = n // 2
    if n % 2 == 1:
        return values[mid]
    return (values[mid - 1] + values[mid]) / 2


def _render_median(value: float, max_steps: int) -> str:
    if math.isinf(value):
        return f">{max_steps}"
    if value == int(value):
        return str(int(value))
    return f"{value:.1f}"


def trajectory_csv(record: RunRecord) -> str:
    lines = ["step,score"]
    for step, score in record.trajectory:
        lines.append(f"{step},{format_percent(score.numerator, 100 * score.denominator)}")
    return "\n".join(lines) + "\n"


def build_comparison(designs: list[str], n_seeds: int,
                     combos: list[tuple[str, str]] | None = None,
                     probe_budget: int = DEFAULT_PROBE_BUDGET,
                     probe_seeds: int = 3,
                     agent_config_for=default_agent_config) -> dict[str, str]:
    """Run the full comparison; returns {filename: csv text}."""
    if n_seeds < 1:
        raise ValueError("n_seeds must be >= 1")
    if combos is None:
        combos = [(p, s) for p in POLICY_ORDER for s in SCHEME_ORDER]
    seeds = list(range(n_seeds))

    columns = ["design", "max_coverage", "random"]
    columns += [f"{p}_{s}" for p, s in combos]
    summary_rows = [",".join(columns)]
    maxcov_rows = ["design,coverage_type,max_percent,budget,method"]
    files: dict[str, str] = {}

    for design in designs:
        entry = load_design(design)
        max_record = find_max_coverage(entry, entry.env_config.coverage_type,
                                       probe_budget, probe_seeds)
        maxcov_rows.append(
            f"{entry.name},{max_record.coverage_type},{max_record.percent_text},"
            f"{max_record.budget},{max_record.method}")
        records = run_matrix(entry, combos, seeds, max_record,
                             agent_config_for=agent_config_for)
        cells = [entry.name, max_record.percent_text]
        random_median = median_steps([records[("random", "none", s)] for s in seeds])
        cells.append(_render_median(random_median, entry.env_config.max_steps))
        for policy, scheme in combos:
            med = median_steps([records[(policy, scheme, s)] for s in seeds])
            cells.append(_render_median(med, entry.env_config.max_steps))
        summary_rows.append(",".join(cells))

        for (policy, scheme, seed), record in sorted(records.items()):
            files[f"trajectory_{entry.name}_{policy}_{scheme}_{seed}.csv"] = \
                trajectory_csv(record)

    files["summary.csv"] = "\n".join(summary_rows) + "\n"
    files["maxcov.csv"] = "\n".join(maxcov_rows) + "\n"
    return files


def compare(designs: list[str], n_seeds: int, out_dir: str | Path,
            combos: list[tuple[str, str]] | None = None,
            probe_budget: int = DEFAULT_PROBE_BUDGET,
            probe_seeds: int = 3,
            agent_config_for=default_agent_config) -> dict[str, Path]:
    """Run the comparison and write every CSV under out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = build_comparison(designs, n_seeds, combos, probe_budget, probe_seeds,
                             agent_config_for)
    written: dict[str, Path] = {}
    for name, text in files.items():
        path = out / name
        path.write_text(text, encoding="utf-8")
        written[name] = path
    return written
