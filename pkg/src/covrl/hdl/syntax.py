"""Syntax tree for the supported subset.

Expression nodes carry two width annotations filled in during elaboration:
`self_width` (self-determined size) and `eval_width` (context-determined size
the node is evaluated at). Condition leaves additionally carry `site_id` once
condition sites are numbered.
"""

from __future__ import annotations

from dataclasses import dataclass, field


# --- expressions -----------------------------------------------------------

@dataclass
class Expr:
    line: int = field(default=0, compare=False)
    self_width: int = field(default=0, compare=False)
    eval_width: int = field(default=0, compare=False)
    site_id: int | None = field(default=None, compare=False)


@dataclass
class Num(Expr):
    value: int = 0
    width: int | None = None  # declared size, None for plain decimals


@dataclass
class Ref(Expr):
    name: str = ""


@dataclass
class ParamRef(Expr):
    name: str = ""
    value: int = 0
    width: int | None = None


@dataclass
class Index(Expr):
    """Bit-select on a vector or element-select on an array."""
    name: str = ""
    index: Expr | None = None


@dataclass
class PartSelect(Expr):
    name: str = ""
    msb: int = 0
    lsb: int = 0


@dataclass
class Unary(Expr):
    op: str = ""
    operand: Expr | None = None


@dataclass
class Binary(Expr):
    op: str = ""
    left: Expr | None = None
    right: Expr | None = None


@dataclass
class Ternary(Expr):
    cond: Expr | None = None
    then: Expr | None = None
    other: Expr | None = None
    cond_leaves: list[Expr] = field(default_factory=list, compare=False)


# --- statements ------------------------------------------------------------

@dataclass
class Target:
    name: str
    index: Expr | None = None  # array element write
    line: int = 0


@dataclass
class Stmt:
    line: int = field(default=0, compare=False)
    block_id: int = field(default=-1, compare=False)


@dataclass
class AssignStmt(Stmt):
    target: Target | None = None
    rhs: Expr | None = None
    blocking: bool = False


@dataclass
class Group(Stmt):
    """A begin/end statement group or an implicit single-statement group."""
    stmts: list[Stmt] = field(default_factory=list)


@dataclass
class If(Stmt):
    cond: Expr | None = None
    then: Group | None = None
    other: Group | None = None
    cond_leaves: list[Expr] = field(default_factory=list, compare=False)


@dataclass
class CaseArm:
    labels: list[Expr] = field(default_factory=list)
    body: Group | None = None
    site_id: int | None = None
    line: int = 0


@dataclass
class Case(Stmt):
    selector: Expr | None = None
    arms: list[CaseArm] = field(default_factory=list)
    default: Group | None = None


# --- module items ----------------------------------------------------------

@dataclass
class PortDecl:
    name: str
    direction: str  # input | output | inout
    width: int
    line: int
    order: int


@dataclass
class SignalDecl:
    name: str
    width: int
    kind: str  # wire | reg
    array_len: int | None = None
    line: int = 0


@dataclass
class ContAssign:
    target: Target
    rhs: Expr
    line: int = 0


@dataclass
class Process:
    clock: str
    async_reset: str | None  # reset signal named in the event list, if any
    reset_edge: str | None  # 'pos' | 'neg'
    body: Group
    line: int = 0
