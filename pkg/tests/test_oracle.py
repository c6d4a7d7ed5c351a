"""Instrumented coverage vs the independent trace-replay oracle."""

from fractions import Fraction

import numpy as np
import pytest

from covrl.corpus import load_corpus, load_design
from covrl.sim.bits import BitVector
from covrl.sim.coverage import coverage_score
from covrl.sim.simulator import SimInstance

from trace_oracle import TraceOracle, oracle_matches_db


def drive_random(entry, cycles: int, seed: int) -> SimInstance:
    sim = SimInstance(entry.ir, record_trace=True)
    rng = np.random.default_rng(seed)
    clock = entry.ports.clock.name if entry.ports.clock else None
    driven = [p for p in entry.ports.inputs if p.name != clock]
    for cycle in range(cycles):
        inputs = {}
        for p in driven:
            if p.role == "reset":
                asserted = 0 if p.active_low else 1
                deasserted = 1 if p.active_low else 0
                inputs[p.name] = BitVector(p.width, asserted if cycle == 0 else deasserted)
            else:
                inputs[p.name] = BitVector(p.width, int(rng.integers(0, 1 << p.width)))
        sim.step(inputs)
    return sim


@pytest.mark.parametrize("name", ["alu", "tap_fsm", "fifo_sync", "fir4"])
def test_oracle_equivalence_on_random_trace(name):
    entry = load_design(name)
    sim = drive_random(entry, 1000, seed=20240 + len(name))
    assert oracle_matches_db(entry.ir, sim.trace, sim.db) == []


def test_alu_reference_trace_score_equals_oracle_recount():
    entry = load_design("alu")
    sim = drive_random(entry, 100, seed=4242)
    cov = TraceOracle(entry.ir).replay(sim.trace)
    oracle_covered = (len(cov.blocks) + len(cov.expr_true) + len(cov.expr_false)
                      + len(cov.toggle_rise) + len(cov.toggle_fall))
    covered, total = sim.db.counts("code")
    assert covered == oracle_covered
    assert coverage_score(sim.db, "code") == Fraction(covered * 100, total)


def test_fsm_soundness_marked_transitions_exist_statically():
    entry = load_design("tap_fsm")
    sim = drive_random(entry, 500, seed=77)
    desc = entry.ir.fsm_candidates[0]
    taken = {arc for arc, hit in sim.db.fsm_transitions[0].items() if hit}
    assert taken <= set(desc.transitions)
    assert taken  # the walk actually moved


def test_oracle_equivalence_with_reset_pulses_mid_run():
    entry = load_design("tap_fsm")
    sim = SimInstance(entry.ir, record_trace=True)
    rng = np.random.default_rng(5)
    for cycle in range(400):
        rst = 1 if cycle % 97 == 0 else 0  # occasional re-reset
        sim.step({"rst": BitVector(1, rst),
                  "tms": BitVector(1, int(rng.integers(2)))})
    assert oracle_matches_db(entry.ir, sim.trace, sim.db) == []


def test_oracle_equivalence_all_corpus_short_traces():
    for entry in load_corpus():
        sim = drive_random(entry, 64, seed=3)
        assert oracle_matches_db(entry.ir, sim.trace, sim.db) == []
