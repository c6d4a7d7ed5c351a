"""State-machine recovery from the IR.

A register qualifies as a state register when every assignment to it is a
named constant and exactly one case statement (the transition case) both
selects on it and assigns it. Transition arcs are collected statically from
the case arms; an arm that can fall through without assigning the register
contributes an implicit self arc.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from covrl.hdl import syntax as ast


@dataclass
class FsmDescriptor:
    state_register: str
    states: list[tuple[str, int]]  # (constant name, value), stable order
    transitions: list[tuple[str, str]]
    reset_state: str | None = None

    state_values: dict[int, str] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self.state_values:
            self.state_values = {value: name for name, value in self.states}

    @property
    def state_names(self) -> list[str]:
        return [name for name, _ in self.states]

    def transition_values(self) -> set[tuple[int, int]]:
        by_name = {name: value for name, value in self.states}
        return {(by_name[a], by_name[b]) for a, b in self.transitions}


def detect_fsms(ir) -> list[FsmDescriptor]:
    out = []
    for name, sig in ir.signals.items():
        if sig.kind != "reg" or sig.array_len is not None:
            continue
        desc = _analyze_register(ir, name)
        if desc is not None:
            out.append(desc)
    return out


def _assignments_to(group: ast.Group, reg: str, out: list[ast.AssignStmt]) -> None:
    for stmt in group.stmts:
        if isinstance(stmt, ast.AssignStmt):
            if stmt.target.name == reg:
                out.append(stmt)
        elif isinstance(stmt, ast.If):
            _assignments_to(stmt.then, reg, out)
            if stmt.other is not None:
                _assignments_to(stmt.other, reg, out)
        elif isinstance(stmt, ast.Case):
            for arm in stmt.arms:
                _assignments_to(arm.body, reg, out)
            if stmt.default is not None:
                _assignments_to(stmt.default, reg, out)
        elif isinstance(stmt, ast.Group):
            _assignments_to(stmt, reg, out)


def _cases_on(group: ast.Group, reg: str, out: list[ast.Case]) -> None:
    for stmt in group.stmts:
        if isinstance(stmt, ast.Case):
            if isinstance(stmt.selector, ast.Ref) and stmt.selector.name == reg:
                assigns: list[ast.AssignStmt] = []
                for arm in stmt.arms:
                    _assignments_to(arm.body, reg, assigns)
                if stmt.default is not None:
                    _assignments_to(stmt.default, reg, assigns)
                if assigns:
                    out.append(stmt)
            for arm in stmt.arms:
                _cases_on(arm.body, reg, out)
            if stmt.default is not None:
                _cases_on(stmt.default, reg, out)
        elif isinstance(stmt, ast.If):
            _cases_on(stmt.then, reg, out)
            if stmt.other is not None:
                _cases_on(stmt.other, reg, out)
        elif isinstance(stmt, ast.Group):
            _cases_on(stmt, reg, out)


def _must_assign(group: ast.Group, reg: str) -> bool:
    for stmt in group.stmts:
        if isinstance(stmt, ast.AssignStmt) and stmt.target.name == reg:
            return True
        if isinstance(stmt, ast.If):
            if stmt.other is not None and _must_assign(stmt.then, reg) \
                    and _must_assign(stmt.other, reg):
                return True
        elif isinstance(stmt, ast.Case):
            if stmt.default is not None and _must_assign(stmt.default, reg) \
                    and all(_must_assign(arm.body, reg) for arm in stmt.arms):
                return True
        elif isinstance(stmt, ast.Group):
            if _must_assign(stmt, reg):
                return True
    return False


def _analyze_register(ir, reg: str) -> FsmDescriptor | None:
    all_assigns: list[ast.AssignStmt] = []
    for proc in ir.processes:
        _assignments_to(proc.body, reg, all_assigns)
    if not all_assigns:
        return None
    for stmt in all_assigns:
        if not isinstance(stmt.rhs, ast.ParamRef):
            return None

    cases: list[ast.Case] = []
    for proc in ir.processes:
        _cases_on(proc.body, reg, cases)
    if len(cases) != 1:
        return None
    case = cases[0]
    if any(not isinstance(lab, ast.ParamRef) for arm in case.arms for lab in arm.labels):
        return None

    # full case: every constant ever assigned to the register is a label
    labels: list[ast.ParamRef] = [lab for arm in case.arms for lab in arm.labels]
    label_names = {lab.name for lab in labels}
    assigned_names = {stmt.rhs.name for stmt in all_assigns}
    if not assigned_names <= label_names:
        return None

    states: list[tuple[str, int]] = []
    seen: set[str] = set()
    for lab in labels:
        if lab.name not in seen:
            states.append((lab.name, lab.value))
            seen.add(lab.name)

    transitions: list[tuple[str, str]] = []

    def add(arc: tuple[str, str]) -> None:
        if arc not in transitions:
            transitions.append(arc)

    for arm in case.arms:
        arm_assigns: list[ast.AssignStmt] = []
        _assignments_to(arm.body, reg, arm_assigns)
        targets = []
        for stmt in arm_assigns:
            if stmt.rhs.name not in targets:
                targets.append(stmt.rhs.name)
        for lab in arm.labels:
            for dst in targets:
                add((lab.name, dst))
            if not _must_assign(arm.body, reg):
                add((lab.name, lab.name))

    # reset entry: a constant assigned outside the transition case
    reset_state = None
    case_assigns: list[ast.AssignStmt] = []
    for arm in case.arms:
        _assignments_to(arm.body, reg, case_assigns)
    if case.default is not None:
        _assignments_to(case.default, reg, case_assigns)
    outside = [s for s in all_assigns if s not in case_assigns]
    if outside:
        reset_state = outside[0].rhs.name

    return FsmDescriptor(state_register=reg, states=states,
                         transitions=transitions, reset_state=reset_state)
