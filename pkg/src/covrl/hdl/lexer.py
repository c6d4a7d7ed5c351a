"""Tokenizer for the supported Verilog subset."""

from __future__ import annotations

import re
from dataclasses import dataclass

from covrl.errors import HdlSyntaxError, UnsupportedConstruct

KEYWORDS = {
    "module", "endmodule", "input", "output", "inout", "wire", "reg",
    "assign", "always", "posedge", "negedge", "or", "if", "else",
    "case", "endcase", "default", "begin", "end",
    "localparam", "parameter", "signed",
}

# Legal Verilog we deliberately do not model; named so errors can say why.
UNSUPPORTED_KEYWORDS = {
    "initial", "generate", "endgenerate", "genvar", "function", "endfunction",
    "task", "endtask", "integer", "real", "time", "event", "fork", "join",
    "casex", "casez", "while", "for", "repeat", "forever", "wait", "deassign",
    "force", "release", "specify", "endspecify", "primitive", "endprimitive",
    "tri", "supply0", "supply1", "pulldown", "pullup", "defparam",
    "always_ff", "always_comb", "always_latch", "logic", "typedef", "enum",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<line_comment>//[^\n]*)
  | (?P<block_comment>/\*.*?\*/)
  | (?P<based>(\d[\d_]*)?'[sS]?[bBdDhHoO][0-9a-fA-FxXzZ_?]+)
  | (?P<number>\d[\d_]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_$]*)
  | (?P<op><<<|>>>|<<|>>|<=|>=|==|!=|&&|\|\||[+\-*/%&|^~!<>=?:;,.()\[\]{}@\#$])
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass
class Token:
    kind: str  # 'kw', 'id', 'num', 'based', 'op', 'eof'
    text: str
    line: int
    col: int


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    line = 1
    line_start = 0
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if not m:
            col = pos - line_start + 1
            raise HdlSyntaxError(line, col, source[pos], "unrecognized character")
        text = m.group(0)
        col = pos - line_start + 1
        group = m.lastgroup
        if group in ("ws", "line_comment", "block_comment"):
            nl = text.count("\n")
            if nl:
                line += nl
                line_start = pos + text.rfind("\n") + 1
        elif group == "based":
            tokens.append(Token("based", text, line, col))
        elif group == "number":
            tokens.append(Token("num", text, line, col))
        elif group == "ident":
            if text in UNSUPPORTED_KEYWORDS:
                raise UnsupportedConstruct(text, line, col)
            kind = "kw" if text in KEYWORDS else "id"
            tokens.append(Token(kind, text, line, col))
        else:
            tokens.append(Token("op", text, line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, n - line_start + 1))
    return tokens


def parse_literal(tok: Token) -> tuple[int, int | None]:
    """Decode a numeric token to (value, declared width or None)."""
    text = tok.text.replace("_", "")
    if tok.kind == "num":
        return int(text), None
    size_part, _, rest = text.partition("'")
    rest = rest.lstrip("sS")
    base_char = rest[0].lower()
    digits = rest[1:]
    if any(c in "xXzZ?" for c in digits):
        raise UnsupportedConstruct("four-state literal", tok.line, tok.col)
    base = {"b": 2, "d": 10, "h": 16, "o": 8}[base_char]
    try:
        value = int(digits, base)
    except ValueError:
        raise HdlSyntaxError(tok.line, tok.col, tok.text, "bad numeric literal") from None
    width = int(size_part) if size_part else None
    if width is not None and width >= 1 and value >= (1 << width):
        raise HdlSyntaxError(tok.line, tok.col, tok.text, "literal exceeds its declared width")
    return value, width
