"""Token-level SystemVerilog syntax smoke check for generated benches.

Not a compiler: strips comments and strings, then verifies bracket balance,
module/endmodule and begin/end pairing, and that statements exist at all.
Catches template regressions (unbalanced emission, broken loops) cheaply.
"""

from __future__ import annotations

import re

_WORD_RE = re.compile(r"[A-Za-z_$][A-Za-z0-9_$]*")

# function/task are omitted: DPI import prototypes legally have no end pair
_PAIRS = {
    "module": "endmodule",
    "begin": "end",
    "case": "endcase",
}


def _strip(text: str) -> str:
    out = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "/" and i + 1 < n and text[i + 1] == "/":
            j = text.find("\n", i)
            i = n if j < 0 else j
        elif c == "/" and i + 1 < n and text[i + 1] == "*":
            j = text.find("*/", i + 2)
            if j < 0:
                out.append("\x00unterminated-comment")
                break
            i = j + 2
        elif c == '"':
            j = i + 1
            while j < n and text[j] != '"':
                j += 2 if text[j] == "\\" else 1
            if j >= n:
                out.append("\x00unterminated-string")
                break
            i = j + 1
            out.append(" <str> ")
        else:
            out.append(c)
            i += 1
    return "".join(out)


def sv_syntax_problems(text: str) -> list[str]:
    problems: list[str] = []
    stripped = _strip(text)
    if "\x00unterminated-comment" in stripped:
        problems.append("unterminated block comment")
    if "\x00unterminated-string" in stripped:
        problems.append("unterminated string literal")

    for open_c, close_c in (("(", ")"), ("[", "]"), ("{", "}")):
        depth = 0
        for c in stripped:
            if c == open_c:
                depth += 1
            elif c == close_c:
                depth -= 1
                if depth < 0:
                    break
        if depth != 0:
            problems.append(f"unbalanced {open_c}{close_c}")

    words = _WORD_RE.findall(stripped)
    counts = {w: words.count(w) for w in
              set(list(_PAIRS.keys()) + list(_PAIRS.values()))}
    for opener, closer in _PAIRS.items():
        if counts.get(opener, 0) != counts.get(closer, 0):
            problems.append(f"{opener}/{closer} mismatch "
                            f"({counts.get(opener, 0)} vs {counts.get(closer, 0)})")
    if counts.get("module", 0) < 1:
        problems.append("no module declaration")
    if ";" not in stripped:
        problems.append("no statements")
    return problems
