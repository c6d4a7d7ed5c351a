"""Corpus integrity and recommended configurations."""

import json

import pytest

from covrl.corpus import CORPUS_DIR, DESIGN_NAMES, load_corpus, load_design
from covrl.errors import IntegrityError, UnknownPort
from covrl.rlenv import action_space_size, make_backend, make_env


def test_corpus_loads_and_verifies():
    entries = load_corpus()
    assert [e.name for e in entries] == list(DESIGN_NAMES)


def test_unknown_design_rejected():
    with pytest.raises(UnknownPort):
        load_design("cordic")


def test_alu_recommended_action_space_is_eight():
    entry = load_design("alu")
    assert entry.env_config.ports == ["opcode"]
    env = make_env(entry.env_config, make_backend(entry.ir, entry.ports))
    assert env.action_count == 8


def test_tap_has_sixteen_states():
    entry = load_design("tap_fsm")
    assert entry.golden["counts"]["fsm_states"] == 16
    assert sum(len(f.states) for f in entry.ir.fsm_candidates) == 16


def test_fifo_recommended_ports_give_two_to_the_sixth():
    entry = load_design("fifo_sync")
    assert entry.env_config.ports == ["we", "re", "din"]
    specs = [entry.ports.get(n) for n in entry.env_config.ports]
    assert action_space_size(specs) == 2 ** 6


def test_every_design_reaches_recorded_max_within_recorded_budget():
    from covrl.experiment import find_max_coverage

    for entry in load_corpus():
        recorded = entry.golden["max_coverage"]
        record = find_max_coverage(entry, recorded["coverage_type"],
                                   recorded["budget"], recorded["seeds"])
        assert record.percent_text == recorded["percent"]
        assert record.method == recorded["method"]


def test_corrupted_golden_raises_integrity_error(tmp_path, monkeypatch):
    golden_path = CORPUS_DIR / "alu.golden.json"
    doc = json.loads(golden_path.read_text())
    doc["counts"]["blocks"] += 1
    mangled = tmp_path / "alu.golden.json"
    mangled.write_text(json.dumps(doc))

    real_read_text = type(golden_path).read_text

    def fake_read_text(self, *args, **kwargs):
        if self.name == "alu.golden.json":
            return real_read_text(mangled, *args, **kwargs)
        return real_read_text(self, *args, **kwargs)

    monkeypatch.setattr(type(golden_path), "read_text", fake_read_text)
    with pytest.raises(IntegrityError):
        load_design("alu")
