"""Elaboration of a DesignIR into an executable cycle-based instance.

One `step_cycle` call is one clock posedge: inputs are applied, continuous
assigns settle, clocked processes execute, non-blocking assigns commit, and
combinational logic settles again so outputs and the stored state agree.
Registers initialize to zero. Toggle activity compares settled end-of-cycle
values against the previous cycle (cycle zero is the all-zero state). The
clock itself has no sampled value and is excluded from toggle items.
"""

from __future__ import annotations

from typing import Callable

from covrl.errors import MissingPort, MultipleClocks, UnknownPort, WidthMismatch
from covrl.hdl import syntax as ast
from covrl.hdl.design import DesignIR
from covrl.sim.bits import BitVector
from covrl.sim.coverage import CoverageDB, CoverageSnapshot


def _mask(width: int) -> int:
    return (1 << width) - 1


class SimInstance:
    def __init__(self, ir: DesignIR, record_trace: bool = False):
        clocks = {p.clock for p in ir.processes}
        if len(clocks) > 1:
            raise MultipleClocks(clocks)
        self.ir = ir
        self.clock = next(iter(clocks)) if clocks else None
        self.record_trace = record_trace
        self._compile()
        self.reset()

    # --- lifetime ---

    def reset(self) -> None:
        """Zero all state, clear coverage, rewind the cycle counter."""
        self.values: dict[str, int] = {}
        self.arrays: dict[str, list[int]] = {}
        for name, sig in self.ir.signals.items():
            if sig.array_len is not None:
                self.arrays[name] = [0] * sig.array_len
            else:
                self.values[name] = 0
        self.prev_values = dict(self.values)
        self.prev_arrays = {k: list(v) for k, v in self.arrays.items()}
        self.cycle = 0
        self.trace: list[tuple[int, str, int]] = []
        self.db = CoverageDB(
            block_total=self.ir.block_count,
            toggle_entries=self._toggle_entries(),
            site_total=self.ir.site_count,
            fsms=self.ir.fsm_candidates,
        )

    def _toggle_entries(self) -> list[tuple[str, int, int]]:
        entries = []
        for name, sig in self.ir.signals.items():
            if name == self.clock:
                continue
            entries.append((name, sig.width, sig.array_len or 1))
        return entries

    # --- compilation ---

    def _compile(self) -> None:
        self._assign_fns = [
            (a.target.name, self.ir.signals[a.target.name].width, self._compile_expr(a.rhs))
            for a in self.ir.assigns
        ]
        self._process_fns = [self._compile_group(p.body) for p in self.ir.processes]

    def _compile_expr(self, node: ast.Expr) -> Callable[[], int]:
        mask = _mask(node.eval_width)
        site = node.site_id

        if isinstance(node, (ast.Num, ast.ParamRef)):
            const = node.value & mask
            fn = lambda: const
        elif isinstance(node, ast.Ref):
            name = node.name
            fn = lambda: self.values[name]
        elif isinstance(node, ast.Index):
            name = node.name
            idx_fn = self._compile_expr(node.index)
            if self.ir.signals[name].array_len is not None:
                length = self.ir.signals[name].array_len
                def fn():
                    i = idx_fn()
                    arr = self.arrays[name]
                    return arr[i] if i < length else 0
            else:
                fn = lambda: (self.values[name] >> idx_fn()) & 1
        elif isinstance(node, ast.PartSelect):
            name = node.name
            lsb = node.lsb
            sel_mask = _mask(node.msb - node.lsb + 1)
            fn = lambda: (self.values[name] >> lsb) & sel_mask
        elif isinstance(node, ast.Unary):
            operand = self._compile_expr(node.operand)
            if node.op == "~":
                fn = lambda: (~operand()) & mask
            elif node.op == "!":
                fn = lambda: 0 if operand() else 1
            else:  # unary minus
                fn = lambda: (-operand()) & mask
        elif isinstance(node, ast.Binary):
            left = self._compile_expr(node.left)
            right = self._compile_expr(node.right)
            op = node.op
            width = node.eval_width
            table = {
                "+": lambda: (left() + right()) & mask,
                "-": lambda: (left() - right()) & mask,
                "*": lambda: (left() * right()) & mask,
                "&": lambda: left() & right(),
                "|": lambda: left() | right(),
                "^": lambda: left() ^ right(),
                "==": lambda: 1 if left() == right() else 0,
                "!=": lambda: 1 if left() != right() else 0,
                "<": lambda: 1 if left() < right() else 0,
                "<=": lambda: 1 if left() <= right() else 0,
                ">": lambda: 1 if left() > right() else 0,
                ">=": lambda: 1 if left() >= right() else 0,
                "&&": lambda: 1 if (left() != 0) & (right() != 0) else 0,
                "||": lambda: 1 if (left() != 0) | (right() != 0) else 0,
            }
            if op in table:
                fn = table[op]
            elif op == "<<":
                def fn():
                    amount = right()
                    return (left() << amount) & mask if amount < width else 0
            elif op == ">>":
                fn = lambda: left() >> right()
            elif op == "/":
                def fn():
                    d = right()
                    return (left() // d) & mask if d else 0
            else:  # %
                def fn():
                    d = right()
                    return left() % d if d else 0
        elif isinstance(node, ast.Ternary):
            cond = self._compile_expr(node.cond)
            then = self._compile_expr(node.then)
            other = self._compile_expr(node.other)
            fn = lambda: then() if cond() else other()
        else:
            raise TypeError(f"unexpected expression node {type(node).__name__}")

        if site is None:
            return fn

        def marked():
            value = fn()
            self.db.mark_expr(site, value != 0)
            return value
        return marked

    def _compile_group(self, group: ast.Group) -> Callable[[list], None]:
        steps = [self._compile_stmt(s) for s in group.stmts]
        block_id = group.block_id

        def run(nba: list) -> None:
            if block_id >= 0:
                self.db.mark_block(block_id)
            for step in steps:
                step(nba)
        return run

    def _compile_stmt(self, stmt: ast.Stmt) -> Callable[[list], None]:
        if isinstance(stmt, ast.AssignStmt):
            name = stmt.target.name
            sig = self.ir.signals[name]
            rhs = self._compile_expr(stmt.rhs)
            width_mask = _mask(sig.width)
            if stmt.target.index is not None:
                idx_fn = self._compile_expr(stmt.target.index)
                length = sig.array_len
                if stmt.blocking:
                    def run(nba):
                        i = idx_fn()
                        v = rhs() & width_mask
                        if i < length:
                            self.arrays[name][i] = v
                else:
                    def run(nba):
                        nba.append((name, idx_fn(), rhs() & width_mask))
            else:
                if stmt.blocking:
                    def run(nba):
                        self.values[name] = rhs() & width_mask
                else:
                    def run(nba):
                        nba.append((name, None, rhs() & width_mask))
            return run
        if isinstance(stmt, ast.If):
            cond = self._compile_expr(stmt.cond)
            then = self._compile_group(stmt.then)
            other = self._compile_group(stmt.other) if stmt.other is not None else None

            def run(nba):
                if cond():
                    then(nba)
                elif other is not None:
                    other(nba)
            return run
        if isinstance(stmt, ast.Case):
            selector = self._compile_expr(stmt.selector)
            arms = []
            for arm in stmt.arms:
                labels = [self._compile_expr(lab) for lab in arm.labels]
                arms.append((labels, arm.site_id, self._compile_group(arm.body)))
            default = self._compile_group(stmt.default) if stmt.default is not None else None

            def run(nba):
                sel = selector()
                chosen = None
                for labels, site_id, body in arms:
                    match = any(lab() == sel for lab in labels)
                    if site_id is not None:
                        self.db.mark_expr(site_id, match)
                    if match and chosen is None:
                        chosen = body
                if chosen is not None:
                    chosen(nba)
                elif default is not None:
                    default(nba)
            return run
        if isinstance(stmt, ast.Group):
            return self._compile_group(stmt)
        raise TypeError(f"unexpected statement node {type(stmt).__name__}")

    # --- execution ---

    def _settle(self) -> None:
        for name, width, fn in self._assign_fns:
            self.values[name] = fn() & _mask(width)

    def _validate_inputs(self, inputs: dict[str, BitVector]) -> None:
        port_names = {p.name: p for p in self.ir.ports}
        for name, bv in inputs.items():
            port = port_names.get(name)
            if port is None or port.direction != "input":
                raise UnknownPort(name)
            if name == self.clock:
                raise UnknownPort(name, f"clock port {name!r} is driven implicitly")
            if bv.width != port.width:
                raise WidthMismatch(name, port.width, bv.width)
        for port in self.ir.ports:
            if port.direction == "input" and port.name != self.clock \
                    and port.name not in inputs:
                raise MissingPort(port.name)

    def step(self, inputs: dict[str, BitVector]) -> tuple[dict[str, BitVector], CoverageSnapshot]:
        self._validate_inputs(inputs)
        for name, bv in inputs.items():
            self.values[name] = bv.value

        self._settle()
        nba: list[tuple[str, int | None, int]] = []
        for proc in self._process_fns:
            proc(nba)
        for name, index, value in nba:
            if index is None:
                self.values[name] = value
            elif index < len(self.arrays[name]):
                self.arrays[name][index] = value
        self._settle()
        self.cycle += 1

        for name, entry_prev in self.prev_values.items():
            if name == self.clock:
                continue
            cur = self.values[name]
            changed = entry_prev ^ cur
            if changed:
                self.db.mark_toggle(name, 0, changed & cur, changed & entry_prev)
        for name, prev_arr in self.prev_arrays.items():
            cur_arr = self.arrays[name]
            for i, prev_elem in enumerate(prev_arr):
                changed = prev_elem ^ cur_arr[i]
                if changed:
                    self.db.mark_toggle(name, i, changed & cur_arr[i], changed & prev_elem)

        for k, desc in enumerate(self.ir.fsm_candidates):
            reg = desc.state_register
            self.db.mark_fsm(k, self.prev_values[reg], self.values[reg])

        self.prev_values = dict(self.values)
        self.prev_arrays = {k: list(v) for k, v in self.arrays.items()}

        if self.record_trace:
            for name in self.values:
                if name != self.clock:
                    self.trace.append((self.cycle, name, self.values[name]))
            for name, arr in self.arrays.items():
                for i, v in enumerate(arr):
                    self.trace.append((self.cycle, f"{name}[{i}]", v))

        snapshot = self.db.snapshot(self.cycle)
        outputs = {
            p.name: BitVector(p.width, self.values[p.name])
            for p in self.ir.ports if p.direction == "output"
        }
        return outputs, snapshot


def elaborate(ir: DesignIR, record_trace: bool = False) -> SimInstance:
    """Build a fresh zero-initialized instance with sized coverage totals."""
    return SimInstance(ir, record_trace=record_trace)


def step_cycle(sim: SimInstance,
               inputs: dict[str, BitVector]) -> tuple[dict[str, BitVector], CoverageSnapshot]:
    return sim.step(inputs)


def write_value_trace(sim: SimInstance, path) -> None:
    """Dump the recorded per-cycle value trace as `cycle,signal,value` CSV."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("cycle,signal,value\n")
        for cycle, name, value in sim.trace:
            fh.write(f"{cycle},{name},{value}\n")
