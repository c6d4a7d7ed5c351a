"""Tiny template language: `{{path}}` interpolation, `{%for%}`, `{%if%}`.

Paths are dotted lookups against the model (dict keys or attributes). Any
path that does not resolve raises UnresolvedPlaceholder; there are no
defaults and no expressions beyond truthiness for `{%if%}`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from covrl.errors import UnresolvedPlaceholder

_TAG_RE = re.compile(r"\{\{(.*?)\}\}|\{%(.*?)%\}", re.DOTALL)


@dataclass
class _Text:
    text: str


@dataclass
class _Interp:
    path: str


@dataclass
class _For:
    var: str
    path: str
    body: list = field(default_factory=list)


@dataclass
class _If:
    path: str
    body: list = field(default_factory=list)


class Template:
    def __init__(self, text: str):
        self.text = text
        self.nodes = self._parse(text)

    @staticmethod
    def _parse(text: str) -> list:
        root: list = []
        stack: list[list] = [root]
        pos = 0
        for m in _TAG_RE.finditer(text):
            if m.start() > pos:
                stack[-1].append(_Text(text[pos:m.start()]))
            pos = m.end()
            if m.group(1) is not None:
                stack[-1].append(_Interp(m.group(1).strip()))
                continue
            tag = m.group(2).strip()
            if tag.startswith("for "):
                parts = tag[4:].split()
                if len(parts) != 3 or parts[1] != "in":
                    raise UnresolvedPlaceholder(tag)
                node = _For(var=parts[0], path=parts[2])
                stack[-1].append(node)
                stack.append(node.body)
            elif tag.startswith("if "):
                node = _If(path=tag[3:].strip())
                stack[-1].append(node)
                stack.append(node.body)
            elif tag in ("endfor", "endif"):
                if len(stack) == 1:
                    raise UnresolvedPlaceholder(tag)
                stack.pop()
            else:
                raise UnresolvedPlaceholder(tag)
        if len(stack) != 1:
            raise UnresolvedPlaceholder("unterminated block")
        if pos < len(text):
            root.append(_Text(text[pos:]))
        return root

    def render(self, model: dict) -> str:
        out: list[str] = []
        self._render_nodes(self.nodes, dict(model), out)
        return "".join(out)

    def _render_nodes(self, nodes: list, scope: dict, out: list[str]) -> None:
        for node in nodes:
            if isinstance(node, _Text):
                out.append(node.text)
            elif isinstance(node, _Interp):
                out.append(str(_resolve(node.path, scope)))
            elif isinstance(node, _For):
                seq = _resolve(node.path, scope)
                try:
                    items = list(seq)
                except TypeError:
                    raise UnresolvedPlaceholder(node.path) from None
                for item in items:
                    inner = dict(scope)
                    inner[node.var] = item
                    self._render_nodes(node.body, inner, out)
            elif isinstance(node, _If):
                if _resolve(node.path, scope, missing_ok=True):
                    self._render_nodes(node.body, scope, out)


def _resolve(path: str, scope: dict, missing_ok: bool = False):
    parts = path.split(".")
    if parts[0] not in scope:
        if missing_ok:
            return None
        raise UnresolvedPlaceholder(path)
    value = scope[parts[0]]
    for part in parts[1:]:
        if isinstance(value, dict) and part in value:
            value = value[part]
        elif hasattr(value, part):
            value = getattr(value, part)
        elif missing_ok:
            return None
        else:
            raise UnresolvedPlaceholder(path)
    return value


def render(template: Template | str, model: dict) -> str:
    if isinstance(template, str):
        template = Template(template)
    return template.render(model)
