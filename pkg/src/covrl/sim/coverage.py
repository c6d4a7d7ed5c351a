"""Cumulative coverage counters and per-cycle snapshots.

Four structural metrics are tracked: block (statement groups executed),
toggle (rise and fall per signal bit), fsm (states visited; transition arcs
are recorded too but the score counts states), and expression (condition
sites seen true and false). Counters are monotone within a run. Scores are
exact rationals; `code` aggregates covered/total sums over the non-empty
categories. A category with no items scores 100 and stays out of the
aggregate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

COVERAGE_TYPES = ("block", "toggle", "fsm", "expression")


def format_percent(covered: int, total: int) -> str:
    """Exact decimal rendering of covered/total as a percent, 6 places."""
    if total == 0:
        return "100.000000"
    scaled = round(Fraction(covered * 100 * 10**6, total))
    whole, frac = divmod(scaled, 10**6)
    return f"{whole}.{frac:06d}"


def _percent(covered: int, total: int) -> Fraction:
    if total == 0:
        return Fraction(100)
    return Fraction(covered * 100, total)


@dataclass
class ToggleEntry:
    name: str
    width: int
    elements: int  # 1 for scalars/vectors, array length for memories
    rose: list[int] = field(default_factory=list)  # bitmask per element
    fell: list[int] = field(default_factory=list)

    def __post_init__(self):
        if not self.rose:
            self.rose = [0] * self.elements
            self.fell = [0] * self.elements


class CoverageDB:
    def __init__(self, block_total: int, toggle_entries: list[tuple[str, int, int]],
                 site_total: int, fsms: list):
        self.block_hit = [False] * block_total
        self.toggles = {name: ToggleEntry(name, width, elems)
                        for name, width, elems in toggle_entries}
        self.expr_true = [False] * site_total
        self.expr_false = [False] * site_total
        self.fsm_states: list[dict[str, bool]] = []
        self.fsm_transitions: list[dict[tuple[str, str], bool]] = []
        self.fsms = fsms
        for desc in fsms:
            self.fsm_states.append({name: False for name, _ in desc.states})
            self.fsm_transitions.append({arc: False for arc in desc.transitions})
        self._new: list[str] = []

    # --- marking (monotone) ---

    def mark_block(self, block_id: int) -> None:
        if not self.block_hit[block_id]:
            self.block_hit[block_id] = True
            self._new.append(f"block:{block_id}")

    def mark_toggle(self, name: str, element: int, rose: int, fell: int) -> None:
        entry = self.toggles[name]
        new_rose = rose & ~entry.rose[element]
        new_fell = fell & ~entry.fell[element]
        if new_rose:
            entry.rose[element] |= new_rose
            self._record_toggle_items(entry, element, new_rose, "rise")
        if new_fell:
            entry.fell[element] |= new_fell
            self._record_toggle_items(entry, element, new_fell, "fall")

    def _record_toggle_items(self, entry: ToggleEntry, element: int,
                             mask: int, kind: str) -> None:
        bit = 0
        while mask:
            if mask & 1:
                where = f"{entry.name}[{element}]" if entry.elements > 1 else entry.name
                self._new.append(f"toggle:{where}.{bit}:{kind}")
            mask >>= 1
            bit += 1

    def mark_expr(self, site_id: int, outcome: bool) -> None:
        if outcome and not self.expr_true[site_id]:
            self.expr_true[site_id] = True
            self._new.append(f"expr:{site_id}:true")
        elif not outcome and not self.expr_false[site_id]:
            self.expr_false[site_id] = True
            self._new.append(f"expr:{site_id}:false")

    def mark_fsm(self, fsm_index: int, prev_value: int, new_value: int) -> None:
        desc = self.fsms[fsm_index]
        name = desc.state_values.get(new_value)
        if name is not None and not self.fsm_states[fsm_index][name]:
            self.fsm_states[fsm_index][name] = True
            self._new.append(f"fsm:{desc.state_register}:state:{name}")
        prev_name = desc.state_values.get(prev_value)
        if prev_name is not None and name is not None:
            arc = (prev_name, name)
            taken = self.fsm_transitions[fsm_index]
            if arc in taken and not taken[arc]:
                taken[arc] = True
                self._new.append(f"fsm:{desc.state_register}:trans:{prev_name}->{name}")

    def drain_new(self) -> list[str]:
        out = self._new
        self._new = []
        return out

    # --- accounting ---

    def counts(self, coverage_type: str) -> tuple[int, int]:
        if coverage_type == "block":
            return sum(self.block_hit), len(self.block_hit)
        if coverage_type == "toggle":
            covered = 0
            total = 0
            for entry in self.toggles.values():
                total += 2 * entry.width * entry.elements
                for element in range(entry.elements):
                    covered += bin(entry.rose[element]).count("1")
                    covered += bin(entry.fell[element]).count("1")
            return covered, total
        if coverage_type == "expression":
            return sum(self.expr_true) + sum(self.expr_false), 2 * len(self.expr_true)
        if coverage_type == "fsm":
            covered = sum(sum(1 for v in states.values() if v) for states in self.fsm_states)
            total = sum(len(states) for states in self.fsm_states)
            return covered, total
        if coverage_type == "code":
            covered = 0
            total = 0
            for t in COVERAGE_TYPES:
                c, n = self.counts(t)
                covered += c
                total += n
            return covered, total
        raise ValueError(f"unknown coverage type {coverage_type!r}")

    def transition_counts(self) -> tuple[int, int]:
        covered = sum(sum(1 for v in taken.values() if v) for taken in self.fsm_transitions)
        total = sum(len(taken) for taken in self.fsm_transitions)
        return covered, total

    def snapshot(self, cycle: int) -> "CoverageSnapshot":
        pairs = {t: self.counts(t) for t in COVERAGE_TYPES}
        pairs["code"] = self.counts("code")
        return CoverageSnapshot(cycle=cycle, pairs=pairs, new_items=self.drain_new())


def coverage_score(db: CoverageDB, coverage_type: str) -> Fraction:
    """Percent score in [0, 100], exact; empty categories score 100."""
    covered, total = db.counts(coverage_type)
    return _percent(covered, total)


@dataclass
class CoverageSnapshot:
    cycle: int
    pairs: dict[str, tuple[int, int]]
    new_items: list[str] = field(default_factory=list)

    def score(self, coverage_type: str) -> Fraction:
        covered, total = self.pairs[coverage_type]
        return _percent(covered, total)

    def csv_line(self) -> str:
        cells = [str(self.cycle)]
        for t in ("block", "toggle", "fsm", "expression", "code"):
            covered, total = self.pairs[t]
            cells.append(format_percent(covered, total))
        return ",".join(cells)


def write_coverage_dump(snapshot: CoverageSnapshot, path) -> None:
    """Append one `cycle,block,toggle,fsm,expr,code` line to the dump file."""
    with open(path, "a", encoding="utf-8", newline="") as fh:
        fh.write(snapshot.csv_line() + "\n")
