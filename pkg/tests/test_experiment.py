"""Max-coverage probes, single runs, comparison CSVs."""

from dataclasses import replace
from fractions import Fraction

import pytest

from covrl.corpus import load_design
from covrl.experiment import (
    SUMMARY_COLUMNS,
    compare,
    default_agent_config,
    find_max_coverage,
    run_one,
)
from covrl.experiment.compare import build_comparison, median_steps
from covrl.experiment.maxcov import MaxCoverageRecord
from covrl.experiment.runner import RunRecord


def test_fir_reaches_full_coverage():
    record = find_max_coverage("fir4", "code", budget=2048, seeds=2)
    assert record.percent == Fraction(100)
    assert record.method == "exhaustive+random"


def test_alu_max_matches_recorded_golden():
    entry = load_design("alu")
    record = find_max_coverage(entry, "code", budget=4096, seeds=3)
    assert record.percent_text == entry.golden["max_coverage"]["percent"]
    assert record.percent < Fraction(100)  # operands held at zero cap toggle


def test_minimal_budget_equals_post_reset_score():
    entry = load_design("tap_fsm")
    record = find_max_coverage(entry, "fsm", budget=1, seeds=1)
    # one action after reset reaches at most two of sixteen states
    assert record.percent <= Fraction(100, 16) * 2


def test_budget_validation():
    with pytest.raises(ValueError):
        find_max_coverage("alu", "code", budget=0)


def test_run_one_is_deterministic():
    entry = load_design("tap_fsm")
    record = find_max_coverage(entry, "fsm", 2048, 2)
    config = replace(entry.env_config, learning_policy="random", seed=7,
                     max_steps=400)
    first = run_one(entry, config, default_agent_config("random"), record)
    second = run_one(entry, config, default_agent_config("random"), record)
    assert first.stimuli_to_max == second.stimuli_to_max
    assert first.trajectory == second.trajectory


def test_run_trajectory_monotone_and_argfirst():
    entry = load_design("tap_fsm")
    record = find_max_coverage(entry, "fsm", 2048, 2)
    config = replace(entry.env_config, learning_policy="random", seed=1,
                     max_steps=500)
    run = run_one(entry, config, default_agent_config("random"), record)
    scores = [s for _, s in run.trajectory]
    assert all(a <= b for a, b in zip(scores, scores[1:]))
    if run.stimuli_to_max is not None:
        at = dict(run.trajectory)[run.stimuli_to_max]
        assert at >= record.percent
        if run.stimuli_to_max > 0:
            before = dict(run.trajectory)[run.stimuli_to_max - 1]
            assert before < record.percent


def test_run_collects_dump_and_trace():
    entry = load_design("fir4")
    record = find_max_coverage(entry, "code", 1024, 2)
    config = replace(entry.env_config, learning_policy="random", seed=3,
                     max_steps=20)
    run = run_one(entry, config, default_agent_config("random"), record,
                  collect_dump=True, collect_trace=True)
    assert run.coverage_dump is not None
    assert run.coverage_dump[0].startswith("1,")
    assert len(run.coverage_dump) == run.steps + 1  # reset cycle included
    assert run.value_trace[0] == "cycle,signal,value"


def test_median_handles_censoring():
    def rec(steps):
        return RunRecord(design="d", policy="p", scheme="s", seed=0,
                         max_percent=Fraction(100), stimuli_to_max=steps)
    assert median_steps([rec(5), rec(7), rec(9)]) == 7
    assert median_steps([rec(5), rec(None), rec(9)]) == 9
    assert median_steps([rec(None), rec(None), rec(9)]) == float("inf")
    assert median_steps([rec(4), rec(6)]) == 5


def test_summary_csv_schema_and_determinism(tmp_path):
    files1 = build_comparison(["fir4"], n_seeds=2, probe_budget=1024, probe_seeds=2)
    files2 = build_comparison(["fir4"], n_seeds=2, probe_budget=1024, probe_seeds=2)
    assert files1 == files2
    header = files1["summary.csv"].splitlines()[0]
    assert header == ",".join(SUMMARY_COLUMNS)
    assert files1["maxcov.csv"].splitlines()[0] == \
        "design,coverage_type,max_percent,budget,method"
    names = set(files1)
    for policy in ("ppo", "a2c", "dqn"):
        for scheme in ("optimistic", "penalty"):
            for seed in (0, 1):
                assert f"trajectory_fir4_{policy}_{scheme}_{seed}.csv" in names
    assert "trajectory_fir4_random_none_0.csv" in names
    body = files1["trajectory_fir4_random_none_0.csv"].splitlines()
    assert body[0] == "step,score"


def test_compare_writes_files(tmp_path):
    out = compare(["fir4"], n_seeds=1, out_dir=tmp_path,
                  combos=[("ppo", "penalty")], probe_budget=512, probe_seeds=1)
    assert (tmp_path / "summary.csv").exists()
    assert (tmp_path / "maxcov.csv").exists()
    header = (tmp_path / "summary.csv").read_text().splitlines()[0]
    assert header == "design,max_coverage,random,ppo_penalty"


def test_random_single_seed_median_is_that_run(tmp_path):
    entry = load_design("fir4")
    record = find_max_coverage(entry, "code", 1024, 2)
    config = replace(entry.env_config, learning_policy="random", seed=0,
                     max_steps=600)
    run = run_one(entry, config, default_agent_config("random"), record)
    files = build_comparison(["fir4"], n_seeds=1, combos=[("ppo", "penalty")],
                             probe_budget=1024, probe_seeds=2)
    row = files["summary.csv"].splitlines()[1].split(",")
    assert row[2] == str(run.stimuli_to_max)
