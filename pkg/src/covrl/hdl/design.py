"""Design intermediate representation and elaboration-time checks.

Width discipline follows the Verilog-2005 unsigned context-determined rules
for the subset: an assignment evaluates its right-hand side at the maximum of
the target width and the expression's self-determined width, propagated
through arithmetic, bitwise, shift-left-operand, and ternary-arm positions.
Comparison operands, shift amounts, indices, and condition expressions are
self-determined. All values are two-state unsigned; wrap-around is masking at
the context width.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from covrl.errors import CombinationalCycle, HdlSyntaxError, UndeclaredSignal, UnsupportedConstruct
from covrl.hdl import syntax as ast
from covrl.hdl.parser import ModuleDecl, parse_module

LOGICAL_OPS = ("&&", "||")
COMPARE_OPS = ("==", "!=", "<", "<=", ">", ">=")
SHIFT_OPS = ("<<", ">>")
ARITH_OPS = ("+", "-", "*", "/", "%", "&", "|", "^")


@dataclass
class DesignIR:
    name: str
    ports: list[ast.PortDecl]
    signals: dict[str, ast.SignalDecl]
    params: dict[str, tuple[int, int | None]]
    assigns: list[ast.ContAssign]  # topologically ordered
    processes: list[ast.Process]
    blocks: list[str] = field(default_factory=list)  # labels, index == block id
    cond_sites: list[str] = field(default_factory=list)  # labels, index == site id
    fsm_candidates: list = field(default_factory=list)

    @property
    def block_count(self) -> int:
        return len(self.blocks)

    @property
    def site_count(self) -> int:
        return len(self.cond_sites)

    def port(self, name: str) -> ast.PortDecl | None:
        for p in self.ports:
            if p.name == name:
                return p
        return None


def parse_design(source: str) -> DesignIR:
    """Parse supported Verilog into a checked, numbered DesignIR."""
    module = parse_module(source)
    return _build_ir(module)


def _build_ir(module: ModuleDecl) -> DesignIR:
    signals: dict[str, ast.SignalDecl] = {}
    for decl in module.signals:
        if decl.name in signals:
            raise HdlSyntaxError(decl.line, 1, decl.name, "duplicate signal")
        if decl.name in module.params:
            raise HdlSyntaxError(decl.line, 1, decl.name, "name collides with a parameter")
        signals[decl.name] = decl

    ir = DesignIR(
        name=module.name,
        ports=module.ports,
        signals=signals,
        params=module.params,
        assigns=module.assigns,
        processes=module.processes,
    )
    _resolve(ir)
    _check_targets(ir)
    ir.assigns = _order_assigns(ir)
    _number_blocks(ir)
    _number_sites(ir)
    _compute_widths(ir)
    from covrl.hdl.fsm import detect_fsms  # local import avoids a cycle

    ir.fsm_candidates = detect_fsms(ir)
    return ir


# --- name resolution -------------------------------------------------------

def _resolve(ir: DesignIR) -> None:
    for assign in ir.assigns:
        assign.rhs = _resolve_expr(ir, assign.rhs)
        _resolve_target(ir, assign.target)
    for proc in ir.processes:
        if proc.clock not in ir.signals:
            raise UndeclaredSignal(proc.clock, proc.line)
        if proc.async_reset is not None and proc.async_reset not in ir.signals:
            raise UndeclaredSignal(proc.async_reset, proc.line)
        _resolve_group(ir, proc.body)


def _resolve_group(ir: DesignIR, group: ast.Group) -> None:
    for i, stmt in enumerate(group.stmts):
        if isinstance(stmt, ast.AssignStmt):
            _resolve_target(ir, stmt.target)
            stmt.rhs = _resolve_expr(ir, stmt.rhs)
        elif isinstance(stmt, ast.If):
            stmt.cond = _resolve_expr(ir, stmt.cond)
            _resolve_group(ir, stmt.then)
            if stmt.other is not None:
                _resolve_group(ir, stmt.other)
        elif isinstance(stmt, ast.Case):
            stmt.selector = _resolve_expr(ir, stmt.selector)
            for arm in stmt.arms:
                arm.labels = [_resolve_expr(ir, lab) for lab in arm.labels]
                _resolve_group(ir, arm.body)
            if stmt.default is not None:
                _resolve_group(ir, stmt.default)
        elif isinstance(stmt, ast.Group):
            _resolve_group(ir, stmt)


def _resolve_target(ir: DesignIR, target: ast.Target) -> None:
    if target.name not in ir.signals:
        raise UndeclaredSignal(target.name, target.line)
    if target.index is not None:
        new = _resolve_expr(ir, target.index)
        target.index = new
        if ir.signals[target.name].array_len is None:
            raise UnsupportedConstruct("bit-select assignment", target.line)


def _resolve_expr(ir: DesignIR, expr: ast.Expr) -> ast.Expr:
    if isinstance(expr, ast.Ref):
        if expr.name in ir.params:
            value, width = ir.params[expr.name]
            return ast.ParamRef(line=expr.line, name=expr.name, value=value, width=width)
        if expr.name not in ir.signals:
            raise UndeclaredSignal(expr.name, expr.line)
        return expr
    if isinstance(expr, ast.Index):
        if expr.name not in ir.signals:
            raise UndeclaredSignal(expr.name, expr.line)
        expr.index = _resolve_expr(ir, expr.index)
        return expr
    if isinstance(expr, ast.PartSelect):
        if expr.name not in ir.signals:
            raise UndeclaredSignal(expr.name, expr.line)
        sig = ir.signals[expr.name]
        if sig.array_len is not None or expr.msb >= sig.width:
            raise HdlSyntaxError(expr.line, 1, expr.name, "part-select out of range")
        return expr
    if isinstance(expr, ast.Unary):
        expr.operand = _resolve_expr(ir, expr.operand)
        return expr
    if isinstance(expr, ast.Binary):
        expr.left = _resolve_expr(ir, expr.left)
        expr.right = _resolve_expr(ir, expr.right)
        return expr
    if isinstance(expr, ast.Ternary):
        expr.cond = _resolve_expr(ir, expr.cond)
        expr.then = _resolve_expr(ir, expr.then)
        expr.other = _resolve_expr(ir, expr.other)
        return expr
    return expr


# --- target legality -------------------------------------------------------

def _check_targets(ir: DesignIR) -> None:
    inputs = {p.name for p in ir.ports if p.direction == "input"}
    seen_comb: set[str] = set()
    for assign in ir.assigns:
        sig = ir.signals[assign.target.name]
        if sig.kind != "wire" or assign.target.name in inputs:
            raise UnsupportedConstruct(
                f"continuous assignment to non-wire {assign.target.name!r}", assign.line)
        if assign.target.name in seen_comb:
            raise UnsupportedConstruct(
                f"multiple drivers for {assign.target.name!r}", assign.line)
        seen_comb.add(assign.target.name)
    for proc in ir.processes:
        _check_proc_targets(ir, proc.body, inputs)


def _check_proc_targets(ir: DesignIR, group: ast.Group, inputs: set[str]) -> None:
    for stmt in group.stmts:
        if isinstance(stmt, ast.AssignStmt):
            sig = ir.signals[stmt.target.name]
            if sig.kind != "reg" or stmt.target.name in inputs:
                raise UnsupportedConstruct(
                    f"procedural assignment to non-reg {stmt.target.name!r}", stmt.line)
            if sig.array_len is not None and stmt.target.index is None:
                raise UnsupportedConstruct(
                    f"whole-array assignment to {stmt.target.name!r}", stmt.line)
        elif isinstance(stmt, ast.If):
            _check_proc_targets(ir, stmt.then, inputs)
            if stmt.other is not None:
                _check_proc_targets(ir, stmt.other, inputs)
        elif isinstance(stmt, ast.Case):
            for arm in stmt.arms:
                _check_proc_targets(ir, arm.body, inputs)
            if stmt.default is not None:
                _check_proc_targets(ir, stmt.default, inputs)
        elif isinstance(stmt, ast.Group):
            _check_proc_targets(ir, stmt, inputs)


# --- combinational ordering ------------------------------------------------

def _free_names(expr: ast.Expr, out: set[str]) -> None:
    if isinstance(expr, (ast.Ref, ast.Index, ast.PartSelect)):
        out.add(expr.name)
        if isinstance(expr, ast.Index):
            _free_names(expr.index, out)
    elif isinstance(expr, ast.Unary):
        _free_names(expr.operand, out)
    elif isinstance(expr, ast.Binary):
        _free_names(expr.left, out)
        _free_names(expr.right, out)
    elif isinstance(expr, ast.Ternary):
        _free_names(expr.cond, out)
        _free_names(expr.then, out)
        _free_names(expr.other, out)


def _order_assigns(ir: DesignIR) -> list[ast.ContAssign]:
    """Topologically order continuous assigns; reject combinational cycles."""
    by_target = {a.target.name: a for a in ir.assigns}
    deps: dict[str, set[str]] = {}
    for assign in ir.assigns:
        names: set[str] = set()
        _free_names(assign.rhs, names)
        deps[assign.target.name] = {n for n in names if n in by_target}
    ordered: list[ast.ContAssign] = []
    placed: set[str] = set()
    pending = [a.target.name for a in ir.assigns]
    while pending:
        progressed = False
        remaining = []
        for name in pending:
            if deps[name] <= placed:
                ordered.append(by_target[name])
                placed.add(name)
                progressed = True
            else:
                remaining.append(name)
        if not progressed:
            raise CombinationalCycle(sorted(remaining)[0])
        pending = remaining
    return ordered


# --- numbering -------------------------------------------------------------

def _number_blocks(ir: DesignIR) -> None:
    labels: list[str] = []

    def visit_group(group: ast.Group, label: str) -> None:
        group.block_id = len(labels)
        labels.append(label)
        walk_stmts(group, label)

    def walk_stmts(group: ast.Group, label: str) -> None:
        for i, stmt in enumerate(group.stmts):
            if isinstance(stmt, ast.If):
                visit_group(stmt.then, f"{label}.if@{stmt.line}:then")
                if stmt.other is not None:
                    visit_group(stmt.other, f"{label}.if@{stmt.line}:else")
            elif isinstance(stmt, ast.Case):
                for j, arm in enumerate(stmt.arms):
                    visit_group(arm.body, f"{label}.case@{stmt.line}:arm{j}")
                if stmt.default is not None:
                    visit_group(stmt.default, f"{label}.case@{stmt.line}:default")
            elif isinstance(stmt, ast.Group):
                # bare begin/end nesting is not an arm; no new block
                walk_stmts(stmt, label)

    for k, proc in enumerate(ir.processes):
        visit_group(proc.body, f"proc{k}")
    ir.blocks = labels


def _cond_leaves(expr: ast.Expr) -> list[ast.Expr]:
    if isinstance(expr, ast.Binary) and expr.op in LOGICAL_OPS:
        return _cond_leaves(expr.left) + _cond_leaves(expr.right)
    if isinstance(expr, ast.Unary) and expr.op == "!":
        return _cond_leaves(expr.operand)
    return [expr]


def _number_sites(ir: DesignIR) -> None:
    labels: list[str] = []

    def site(label: str) -> int:
        labels.append(label)
        return len(labels) - 1

    def mark_cond(expr: ast.Expr, label: str) -> list[ast.Expr]:
        leaves = _cond_leaves(expr)
        for i, leaf in enumerate(leaves):
            leaf.site_id = site(f"{label}:leaf{i}")
            if isinstance(leaf, ast.Ternary):
                # a ternary used as a condition leaf still numbers its own cond
                walk_expr(leaf, label)
            else:
                for child in _children(leaf):
                    walk_expr(child, label)
        return leaves

    def _children(expr: ast.Expr) -> list[ast.Expr]:
        if isinstance(expr, ast.Unary):
            return [expr.operand]
        if isinstance(expr, ast.Binary):
            return [expr.left, expr.right]
        if isinstance(expr, ast.Index):
            return [expr.index]
        return []

    def walk_expr(expr: ast.Expr, label: str) -> None:
        if isinstance(expr, ast.Ternary):
            expr.cond_leaves = mark_cond(expr.cond, f"{label}.tern@{expr.line}")
            walk_expr(expr.then, label)
            walk_expr(expr.other, label)
        elif isinstance(expr, ast.Unary):
            walk_expr(expr.operand, label)
        elif isinstance(expr, ast.Binary):
            walk_expr(expr.left, label)
            walk_expr(expr.right, label)
        elif isinstance(expr, ast.Index):
            walk_expr(expr.index, label)

    def walk_group(group: ast.Group, label: str) -> None:
        for stmt in group.stmts:
            if isinstance(stmt, ast.AssignStmt):
                walk_expr(stmt.rhs, label)
                if stmt.target.index is not None:
                    walk_expr(stmt.target.index, label)
            elif isinstance(stmt, ast.If):
                stmt.cond_leaves = mark_cond(stmt.cond, f"{label}.if@{stmt.line}")
                walk_group(stmt.then, label)
                if stmt.other is not None:
                    walk_group(stmt.other, label)
            elif isinstance(stmt, ast.Case):
                walk_expr(stmt.selector, label)
                for j, arm in enumerate(stmt.arms):
                    arm.site_id = site(f"{label}.case@{stmt.line}:arm{j}")
                    walk_group(arm.body, label)
                if stmt.default is not None:
                    walk_group(stmt.default, label)
            elif isinstance(stmt, ast.Group):
                walk_group(stmt, label)

    for assign in ir.assigns:
        walk_expr(assign.rhs, f"assign@{assign.line}")
    for k, proc in enumerate(ir.processes):
        walk_group(proc.body, f"proc{k}")
    ir.cond_sites = labels


# --- width computation -----------------------------------------------------

def _self_width(ir: DesignIR, expr: ast.Expr) -> int:
    if isinstance(expr, ast.Num):
        w = expr.width if expr.width is not None else 32
    elif isinstance(expr, ast.ParamRef):
        w = expr.width if expr.width is not None else 32
    elif isinstance(expr, ast.Ref):
        w = ir.signals[expr.name].width
    elif isinstance(expr, ast.Index):
        _self_width(ir, expr.index)
        sig = ir.signals[expr.name]
        w = sig.width if sig.array_len is not None else 1
    elif isinstance(expr, ast.PartSelect):
        w = expr.msb - expr.lsb + 1
    elif isinstance(expr, ast.Unary):
        inner = _self_width(ir, expr.operand)
        w = 1 if expr.op == "!" else inner
    elif isinstance(expr, ast.Binary):
        lw = _self_width(ir, expr.left)
        rw = _self_width(ir, expr.right)
        if expr.op in COMPARE_OPS or expr.op in LOGICAL_OPS:
            w = 1
        elif expr.op in SHIFT_OPS:
            w = lw
        else:
            w = max(lw, rw)
    elif isinstance(expr, ast.Ternary):
        _self_width(ir, expr.cond)
        w = max(_self_width(ir, expr.then), _self_width(ir, expr.other))
    else:
        raise TypeError(f"unexpected expression node {type(expr).__name__}")
    expr.self_width = w
    return w


def _set_context(expr: ast.Expr, ctx: int) -> None:
    expr.eval_width = max(ctx, 1)
    if isinstance(expr, (ast.Num, ast.Ref, ast.ParamRef, ast.PartSelect)):
        return
    if isinstance(expr, ast.Index):
        _set_context(expr.index, expr.index.self_width)
        return
    if isinstance(expr, ast.Unary):
        if expr.op == "!":
            _set_context(expr.operand, expr.operand.self_width)
        else:
            _set_context(expr.operand, expr.eval_width)
        return
    if isinstance(expr, ast.Binary):
        if expr.op in COMPARE_OPS:
            cmp_ctx = max(expr.left.self_width, expr.right.self_width)
            _set_context(expr.left, cmp_ctx)
            _set_context(expr.right, cmp_ctx)
        elif expr.op in LOGICAL_OPS:
            _set_context(expr.left, expr.left.self_width)
            _set_context(expr.right, expr.right.self_width)
        elif expr.op in SHIFT_OPS:
            _set_context(expr.left, expr.eval_width)
            _set_context(expr.right, expr.right.self_width)
        else:
            _set_context(expr.left, expr.eval_width)
            _set_context(expr.right, expr.eval_width)
        return
    if isinstance(expr, ast.Ternary):
        _set_context(expr.cond, expr.cond.self_width)
        _set_context(expr.then, expr.eval_width)
        _set_context(expr.other, expr.eval_width)
        return


def _size_assignment(ir: DesignIR, target: ast.Target, rhs: ast.Expr) -> None:
    sig = ir.signals[target.name]
    target_width = sig.width
    if target.index is not None:
        _self_width(ir, target.index)
        _set_context(target.index, target.index.self_width)
    rhs_self = _self_width(ir, rhs)
    _set_context(rhs, max(target_width, rhs_self))


def _size_group(ir: DesignIR, group: ast.Group) -> None:
    for stmt in group.stmts:
        if isinstance(stmt, ast.AssignStmt):
            _size_assignment(ir, stmt.target, stmt.rhs)
        elif isinstance(stmt, ast.If):
            w = _self_width(ir, stmt.cond)
            _set_context(stmt.cond, w)
            _size_group(ir, stmt.then)
            if stmt.other is not None:
                _size_group(ir, stmt.other)
        elif isinstance(stmt, ast.Case):
            sel_w = _self_width(ir, stmt.selector)
            label_ws = []
            for arm in stmt.arms:
                label_ws.extend(_self_width(ir, lab) for lab in arm.labels)
            ctx = max([sel_w] + label_ws)
            _set_context(stmt.selector, ctx)
            for arm in stmt.arms:
                for lab in arm.labels:
                    _set_context(lab, ctx)
                _size_group(ir, arm.body)
            if stmt.default is not None:
                _size_group(ir, stmt.default)
        elif isinstance(stmt, ast.Group):
            _size_group(ir, stmt)


def _compute_widths(ir: DesignIR) -> None:
    for assign in ir.assigns:
        _size_assignment(ir, assign.target, assign.rhs)
    for proc in ir.processes:
        _size_group(ir, proc.body)
