"""Recursive-descent parser producing a raw module declaration.

Single-pass: parameter declarations are folded as they appear so later
declaration ranges (`reg [WIDTH-1:0] ...`) can be evaluated immediately.
Semantic checks and numbering live in covrl.hdl.design.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from covrl.errors import HdlSyntaxError, UnsupportedConstruct
from covrl.hdl import syntax as ast
from covrl.hdl.lexer import Token, parse_literal, tokenize


@dataclass
class ModuleDecl:
    name: str
    ports: list[ast.PortDecl] = field(default_factory=list)
    signals: list[ast.SignalDecl] = field(default_factory=list)
    params: dict[str, tuple[int, int | None]] = field(default_factory=dict)
    assigns: list[ast.ContAssign] = field(default_factory=list)
    processes: list[ast.Process] = field(default_factory=list)


class Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.pos = 0

    # --- token helpers ---

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.next()
        if tok.text != text:
            raise HdlSyntaxError(tok.line, tok.col, tok.text or "<eof>", f"expected {text!r}")
        return tok

    def expect_ident(self) -> Token:
        tok = self.next()
        if tok.kind != "id":
            raise HdlSyntaxError(tok.line, tok.col, tok.text or "<eof>", "expected identifier")
        return tok

    def accept(self, text: str) -> bool:
        if self.peek().text == text:
            self.next()
            return True
        return False

    # --- top level ---

    def parse_module(self) -> ModuleDecl:
        self.expect("module")
        name_tok = self.expect_ident()
        module = ModuleDecl(name=name_tok.text)
        self._header_names: list[tuple[str, int]] = []
        if self.accept("("):
            if not self.accept(")"):
                self._parse_header_ports(module)
                self.expect(")")
        self.expect(";")
        while self.peek().text != "endmodule":
            tok = self.peek()
            if tok.kind == "eof":
                raise HdlSyntaxError(tok.line, tok.col, "<eof>", "expected 'endmodule'")
            self._parse_item(module)
        self.expect("endmodule")
        tail = self.next()
        if tail.kind != "eof":
            raise UnsupportedConstruct("multiple modules", tail.line, tail.col)
        self._finish_ports(module)
        return module

    def _parse_header_ports(self, module: ModuleDecl) -> None:
        direction: str | None = None
        width = 1
        ansi = False
        while True:
            tok = self.peek()
            if tok.text in ("input", "output", "inout"):
                direction = self.next().text
                ansi = True
                kind = "wire"
                if self.peek().text in ("wire", "reg"):
                    kind = self.next().text
                width = self._parse_opt_range(module)
                name = self.expect_ident()
                self._add_port(module, name, direction, width, kind)
            elif tok.kind == "id":
                name = self.next()
                if ansi:
                    self._add_port(module, name, direction, width, "wire")
                else:
                    self._header_names.append((name.text, name.line))
            else:
                raise HdlSyntaxError(tok.line, tok.col, tok.text, "expected port declaration")
            if not self.accept(","):
                break

    def _add_port(self, module: ModuleDecl, name_tok: Token, direction: str,
                  width: int, kind: str) -> None:
        if any(p.name == name_tok.text for p in module.ports):
            raise HdlSyntaxError(name_tok.line, name_tok.col, name_tok.text, "duplicate port")
        module.ports.append(ast.PortDecl(
            name=name_tok.text, direction=direction, width=width,
            line=name_tok.line, order=len(module.ports)))
        module.signals.append(ast.SignalDecl(
            name=name_tok.text, width=width, kind=kind, line=name_tok.line))

    def _finish_ports(self, module: ModuleDecl) -> None:
        for name, line in self._header_names:
            if not any(p.name == name for p in module.ports):
                raise HdlSyntaxError(line, 1, name, "header port never given a direction")
        # restore header order for non-ANSI modules
        if self._header_names:
            order = {name: i for i, (name, _) in enumerate(self._header_names)}
            module.ports.sort(key=lambda p: order[p.name])
            for i, port in enumerate(module.ports):
                port.order = i

    # --- items ---

    def _parse_item(self, module: ModuleDecl) -> None:
        tok = self.peek()
        if tok.text in ("input", "output", "inout"):
            self._parse_direction_decl(module)
        elif tok.text == "wire":
            self._parse_net_decl(module)
        elif tok.text == "reg":
            self._parse_reg_decl(module)
        elif tok.text in ("localparam", "parameter"):
            self._parse_param_decl(module)
        elif tok.text == "assign":
            self._parse_cont_assign(module)
        elif tok.text == "always":
            self._parse_always(module)
        else:
            raise UnsupportedConstruct(tok.text or "<eof>", tok.line, tok.col)

    def _parse_direction_decl(self, module: ModuleDecl) -> None:
        direction = self.next().text
        kind = "wire"
        if self.peek().text in ("wire", "reg"):
            kind = self.next().text
        width = self._parse_opt_range(module)
        while True:
            name = self.expect_ident()
            placed = False
            for port in module.ports:
                if port.name == name.text:
                    if any(s.name == name.text for s in module.signals):
                        raise HdlSyntaxError(name.line, name.col, name.text, "duplicate port declaration")
                    port.direction = direction
                    port.width = width
                    placed = True
                    break
            if not placed:
                if not self._header_names:
                    raise HdlSyntaxError(name.line, name.col, name.text,
                                         "port not listed in module header")
                if name.text not in [n for n, _ in self._header_names]:
                    raise HdlSyntaxError(name.line, name.col, name.text,
                                         "port not listed in module header")
                module.ports.append(ast.PortDecl(
                    name=name.text, direction=direction, width=width,
                    line=name.line, order=len(module.ports)))
            module.signals.append(ast.SignalDecl(
                name=name.text, width=width, kind=kind, line=name.line))
            if not self.accept(","):
                break
        self.expect(";")

    def _parse_net_decl(self, module: ModuleDecl) -> None:
        self.expect("wire")
        width = self._parse_opt_range(module)
        while True:
            name = self.expect_ident()
            module.signals.append(ast.SignalDecl(
                name=name.text, width=width, kind="wire", line=name.line))
            if not self.accept(","):
                break
        self.expect(";")

    def _parse_reg_decl(self, module: ModuleDecl) -> None:
        self.expect("reg")
        width = self._parse_opt_range(module)
        while True:
            name = self.expect_ident()
            array_len = None
            if self.peek().text == "[":
                lo, hi = self._parse_array_range(module)
                if lo != 0:
                    raise UnsupportedConstruct("array range not starting at 0", name.line, name.col)
                array_len = hi + 1
            existing = next((s for s in module.signals if s.name == name.text), None)
            if existing is not None:
                # 'output [w:0] x;' followed by 'reg [w:0] x;' upgrades the kind
                if existing.kind == "wire" and existing.width == width and array_len is None:
                    existing.kind = "reg"
                else:
                    raise HdlSyntaxError(name.line, name.col, name.text, "duplicate signal")
            else:
                module.signals.append(ast.SignalDecl(
                    name=name.text, width=width, kind="reg",
                    array_len=array_len, line=name.line))
            if not self.accept(","):
                break
        self.expect(";")

    def _parse_param_decl(self, module: ModuleDecl) -> None:
        self.next()  # localparam | parameter
        width: int | None = None
        if self.peek().text == "[":
            width = self._parse_opt_range(module)
        while True:
            name = self.expect_ident()
            self.expect("=")
            expr = self.parse_expr(no_ternary=True)
            value = self._const_eval(expr, module)
            lit_width = width
            if lit_width is None and isinstance(expr, ast.Num):
                lit_width = expr.width
            module.params[name.text] = (value, lit_width)
            if not self.accept(","):
                break
        self.expect(";")

    def _parse_cont_assign(self, module: ModuleDecl) -> None:
        self.expect("assign")
        target = self._parse_target()
        self.expect("=")
        rhs = self.parse_expr()
        self.expect(";")
        module.assigns.append(ast.ContAssign(target=target, rhs=rhs, line=target.line))

    def _parse_always(self, module: ModuleDecl) -> None:
        always_tok = self.expect("always")
        self.expect("@")
        self.expect("(")
        events: list[tuple[str, str]] = []
        while True:
            tok = self.next()
            if tok.text not in ("posedge", "negedge"):
                raise UnsupportedConstruct(
                    "level-sensitive or wildcard event control", tok.line, tok.col)
            sig = self.expect_ident()
            events.append((tok.text, sig.text))
            if not (self.accept("or") or self.accept(",")):
                break
        self.expect(")")
        body = self._parse_stmt_group()
        clocks = [name for edge, name in events if edge == "posedge"]
        if not clocks:
            raise UnsupportedConstruct("clockless process", always_tok.line, always_tok.col)
        clock = events[0][1] if events[0][0] == "posedge" else clocks[0]
        reset = None
        reset_edge = None
        if len(events) > 1:
            if len(events) > 2:
                raise UnsupportedConstruct("more than two events", always_tok.line, always_tok.col)
            extra = [e for e in events if e[1] != clock]
            if extra:
                reset_edge = "pos" if extra[0][0] == "posedge" else "neg"
                reset = extra[0][1]
        module.processes.append(ast.Process(
            clock=clock, async_reset=reset, reset_edge=reset_edge,
            body=body, line=always_tok.line))

    # --- statements ---

    def _parse_stmt_group(self) -> ast.Group:
        """Wrap a single statement or a begin/end list into one Group."""
        tok = self.peek()
        if tok.text == "begin":
            self.next()
            stmts = []
            while not self.accept("end"):
                if self.peek().kind == "eof":
                    raise HdlSyntaxError(tok.line, tok.col, "begin", "unterminated block")
                stmts.append(self._parse_stmt())
            return ast.Group(line=tok.line, stmts=stmts)
        return ast.Group(line=tok.line, stmts=[self._parse_stmt()])

    def _parse_stmt(self) -> ast.Stmt:
        tok = self.peek()
        if tok.text == "if":
            self.next()
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            then = self._parse_stmt_group()
            other = None
            if self.accept("else"):
                other = self._parse_stmt_group()
            return ast.If(line=tok.line, cond=cond, then=then, other=other)
        if tok.text == "case":
            return self._parse_case()
        if tok.text == "begin":
            group = self._parse_stmt_group()
            return group
        if tok.kind == "id":
            target = self._parse_target()
            op = self.next()
            if op.text == "<=":
                blocking = False
            elif op.text == "=":
                blocking = True
            else:
                raise HdlSyntaxError(op.line, op.col, op.text, "expected '=' or '<='")
            rhs = self.parse_expr()
            self.expect(";")
            return ast.AssignStmt(line=tok.line, target=target, rhs=rhs, blocking=blocking)
        raise UnsupportedConstruct(tok.text or "<eof>", tok.line, tok.col)

    def _parse_case(self) -> ast.Case:
        case_tok = self.expect("case")
        self.expect("(")
        selector = self.parse_expr()
        self.expect(")")
        arms: list[ast.CaseArm] = []
        default: ast.Group | None = None
        while not self.accept("endcase"):
            tok = self.peek()
            if tok.kind == "eof":
                raise HdlSyntaxError(case_tok.line, case_tok.col, "case", "unterminated case")
            if self.accept("default"):
                self.accept(":")
                if default is not None:
                    raise HdlSyntaxError(tok.line, tok.col, "default", "duplicate default arm")
                default = self._parse_stmt_group()
                continue
            labels = [self.parse_expr(no_ternary=True)]
            while self.accept(","):
                labels.append(self.parse_expr(no_ternary=True))
            self.expect(":")
            body = self._parse_stmt_group()
            arms.append(ast.CaseArm(labels=labels, body=body, line=tok.line))
        return ast.Case(line=case_tok.line, selector=selector, arms=arms, default=default)

    def _parse_target(self) -> ast.Target:
        name = self.expect_ident()
        index = None
        if self.accept("["):
            index = self.parse_expr()
            if self.peek().text == ":":
                raise UnsupportedConstruct("part-select assignment", name.line, name.col)
            self.expect("]")
        return ast.Target(name=name.text, index=index, line=name.line)

    # --- ranges ---

    def _parse_opt_range(self, module: ModuleDecl) -> int:
        if self.peek().text != "[":
            return 1
        tok = self.expect("[")
        msb = self._const_eval(self.parse_expr(no_ternary=True), module)
        self.expect(":")
        lsb = self._const_eval(self.parse_expr(no_ternary=True), module)
        self.expect("]")
        if lsb != 0:
            raise UnsupportedConstruct("vector range not ending at 0", tok.line, tok.col)
        if msb < lsb:
            raise HdlSyntaxError(tok.line, tok.col, "[", "descending range required")
        return msb - lsb + 1

    def _parse_array_range(self, module: ModuleDecl) -> tuple[int, int]:
        tok = self.expect("[")
        lo = self._const_eval(self.parse_expr(no_ternary=True), module)
        self.expect(":")
        hi = self._const_eval(self.parse_expr(no_ternary=True), module)
        self.expect("]")
        if hi < lo:
            raise HdlSyntaxError(tok.line, tok.col, "[", "ascending array range required")
        return lo, hi

    def _const_eval(self, expr: ast.Expr, module: ModuleDecl) -> int:
        if isinstance(expr, ast.Num):
            return expr.value
        if isinstance(expr, ast.Ref):
            if expr.name in module.params:
                return module.params[expr.name][0]
            raise HdlSyntaxError(expr.line, 1, expr.name, "constant expression required")
        if isinstance(expr, ast.Unary) and expr.op in ("-", "+", "~"):
            v = self._const_eval(expr.operand, module)
            return {"-": -v, "+": v, "~": ~v}[expr.op]
        if isinstance(expr, ast.Binary):
            left = self._const_eval(expr.left, module)
            right = self._const_eval(expr.right, module)
            ops = {
                "+": lambda a, b: a + b,
                "-": lambda a, b: a - b,
                "*": lambda a, b: a * b,
                "/": lambda a, b: a // b if b else 0,
                "%": lambda a, b: a % b if b else 0,
                "<<": lambda a, b: a << b,
                ">>": lambda a, b: a >> b,
            }
            if expr.op in ops:
                return ops[expr.op](left, right)
        raise HdlSyntaxError(expr.line, 1, "<expr>", "constant expression required")

    # --- expressions ---

    _BINARY_LEVELS = [
        ["||"],
        ["&&"],
        ["|"],
        ["^"],
        ["&"],
        ["==", "!="],
        ["<", "<=", ">", ">="],
        ["<<", ">>"],
        ["+", "-"],
        ["*", "/", "%"],
    ]

    def parse_expr(self, no_ternary: bool = False) -> ast.Expr:
        expr = self._parse_binary(0)
        if not no_ternary and self.peek().text == "?":
            q = self.next()
            then = self.parse_expr()
            self.expect(":")
            other = self.parse_expr()
            return ast.Ternary(line=q.line, cond=expr, then=then, other=other)
        return expr

    def _parse_binary(self, level: int) -> ast.Expr:
        if level >= len(self._BINARY_LEVELS):
            return self._parse_unary()
        left = self._parse_binary(level + 1)
        while self.peek().text in self._BINARY_LEVELS[level] and self.peek().kind == "op":
            op = self.next()
            right = self._parse_binary(level + 1)
            left = ast.Binary(line=op.line, op=op.text, left=left, right=right)
        return left

    def _parse_unary(self) -> ast.Expr:
        tok = self.peek()
        if tok.text in ("~", "!", "-", "+") and tok.kind == "op":
            self.next()
            operand = self._parse_unary()
            if tok.text == "+":
                return operand
            return ast.Unary(line=tok.line, op=tok.text, operand=operand)
        return self._parse_primary()

    def _parse_primary(self) -> ast.Expr:
        tok = self.next()
        if tok.kind in ("num", "based"):
            value, width = parse_literal(tok)
            return ast.Num(line=tok.line, value=value, width=width)
        if tok.kind == "id":
            if self.peek().text == "[":
                self.next()
                first = self.parse_expr()
                if self.accept(":"):
                    second = self.parse_expr()
                    self.expect("]")
                    msb = self._const_eval(first, ModuleDecl(name="")) if isinstance(first, ast.Num) else None
                    lsb = self._const_eval(second, ModuleDecl(name="")) if isinstance(second, ast.Num) else None
                    if msb is None or lsb is None or msb < lsb:
                        raise UnsupportedConstruct("non-constant part-select", tok.line, tok.col)
                    return ast.PartSelect(line=tok.line, name=tok.text, msb=msb, lsb=lsb)
                self.expect("]")
                return ast.Index(line=tok.line, name=tok.text, index=first)
            return ast.Ref(line=tok.line, name=tok.text)
        if tok.text == "(":
            expr = self.parse_expr()
            self.expect(")")
            return expr
        if tok.text == "{":
            raise UnsupportedConstruct("concatenation", tok.line, tok.col)
        raise HdlSyntaxError(tok.line, tok.col, tok.text or "<eof>", "expected expression")


def parse_module(source: str) -> ModuleDecl:
    return Parser(source).parse_module()
