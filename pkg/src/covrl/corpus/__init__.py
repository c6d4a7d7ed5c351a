"""In-repo designs with golden port specs, structural counts, and env configs.

Each entry ships four files: `<name>.v`, `<name>.ports.xml`, `<name>.golden.json`,
`<name>.env.cfg`. Goldens must regenerate byte-identically from the source;
`load_corpus` re-derives everything and raises IntegrityError on drift.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from covrl.errors import IntegrityError, UnknownPort
from covrl.hdl.design import DesignIR, parse_design
from covrl.hdl.ports import PortSpecSet, emit_port_spec, extract_ports
from covrl.rlenv import EnvConfig, parse_env_config

CORPUS_DIR = Path(__file__).parent
DESIGN_NAMES = ("alu", "tap_fsm", "fifo_sync", "fir4")


@dataclass
class CorpusEntry:
    name: str
    source_path: Path
    source: str
    ir: DesignIR
    ports: PortSpecSet
    golden: dict
    env_config: EnvConfig

    @property
    def structural_counts(self) -> dict:
        fsm_states = sum(len(f.states) for f in self.ir.fsm_candidates)
        fsm_transitions = sum(len(f.transitions) for f in self.ir.fsm_candidates)
        toggle_items = 0
        clock = self.ports.clock.name if self.ports.clock else None
        for name, sig in self.ir.signals.items():
            if name == clock:
                continue
            toggle_items += 2 * sig.width * (sig.array_len or 1)
        return {
            "blocks": self.ir.block_count,
            "condition_sites": self.ir.site_count,
            "toggle_items": toggle_items,
            "fsm_states": fsm_states,
            "fsm_transitions": fsm_transitions,
        }


def _load_entry(name: str, verify: bool) -> CorpusEntry:
    source_path = CORPUS_DIR / f"{name}.v"
    source = source_path.read_text(encoding="utf-8")
    ir = parse_design(source)
    ports = extract_ports(ir)
    golden = json.loads((CORPUS_DIR / f"{name}.golden.json").read_text(encoding="utf-8"))
    env_config = parse_env_config((CORPUS_DIR / f"{name}.env.cfg").read_text(encoding="utf-8"))
    entry = CorpusEntry(name=name, source_path=source_path, source=source,
                        ir=ir, ports=ports, golden=golden, env_config=env_config)
    if verify:
        golden_xml = (CORPUS_DIR / f"{name}.ports.xml").read_text(encoding="utf-8")
        if emit_port_spec(ports, "xml") != golden_xml:
            raise IntegrityError(f"{name}: port spec golden does not regenerate")
        if entry.structural_counts != golden["counts"]:
            raise IntegrityError(
                f"{name}: structural counts drifted: "
                f"{entry.structural_counts} != {golden['counts']}")
        if env_config.top_module != name:
            raise IntegrityError(f"{name}: env config names {env_config.top_module!r}")
    return entry


def load_corpus(verify: bool = True) -> list[CorpusEntry]:
    return [_load_entry(name, verify) for name in DESIGN_NAMES]


def load_design(name: str, verify: bool = True) -> CorpusEntry:
    if name not in DESIGN_NAMES:
        raise UnknownPort(name, f"no corpus design named {name!r}")
    return _load_entry(name, verify)
