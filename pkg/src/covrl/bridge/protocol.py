"""Wire messages: one JSON object per line, LF-terminated, UTF-8.

Frame keys are fixed: type, design, ports, name, width, cycle, coverage,
values, port, bits, reason, code, detail. Coverage travels as a decimal
string in [0, 100] so the reward comparison stays exact on both ends.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from covrl.errors import MalformedFrame


@dataclass(frozen=True)
class Hello:
    design: str
    ports: tuple[tuple[str, int], ...]  # (name, width), negotiation order


@dataclass(frozen=True)
class Request:
    cycle: int
    coverage: str  # decimal string, percent

    def coverage_percent(self) -> Fraction:
        return Fraction(self.coverage)


@dataclass(frozen=True)
class Stimulus:
    values: tuple[tuple[str, str], ...]  # (port, MSB-first bit string)


@dataclass(frozen=True)
class Done:
    reason: str


@dataclass(frozen=True)
class Error:
    code: str
    detail: str = ""


WireMessage = Hello | Request | Stimulus | Done | Error


def encode_message(message: WireMessage) -> bytes:
    if isinstance(message, Hello):
        doc = {"type": "hello", "design": message.design,
               "ports": [{"name": n, "width": w} for n, w in message.ports]}
    elif isinstance(message, Request):
        doc = {"type": "request", "cycle": message.cycle, "coverage": message.coverage}
    elif isinstance(message, Stimulus):
        doc = {"type": "stimulus",
               "values": [{"port": p, "bits": b} for p, b in message.values]}
    elif isinstance(message, Done):
        doc = {"type": "done", "reason": message.reason}
    elif isinstance(message, Error):
        doc = {"type": "error", "code": message.code, "detail": message.detail}
    else:
        raise TypeError(f"not a wire message: {message!r}")
    return json.dumps(doc, separators=(",", ":")).encode("utf-8") + b"\n"


def _need(doc: dict, key: str, kind, line: str):
    if key not in doc:
        raise MalformedFrame(f"missing {key!r}: {line}")
    value = doc[key]
    if kind is int and isinstance(value, bool) or not isinstance(value, kind):
        raise MalformedFrame(f"bad {key!r}: {line}")
    return value


def decode_message(data: bytes | str) -> WireMessage:
    line = data.decode("utf-8", errors="replace") if isinstance(data, bytes) else data
    line = line.rstrip("\r\n")
    if not line.strip():
        raise MalformedFrame("<empty line>")
    try:
        doc = json.loads(line)
    except json.JSONDecodeError:
        raise MalformedFrame(line) from None
    if not isinstance(doc, dict):
        raise MalformedFrame(line)
    kind = doc.get("type")
    if kind == "hello":
        design = _need(doc, "design", str, line)
        ports_raw = _need(doc, "ports", list, line)
        ports = []
        for item in ports_raw:
            if not isinstance(item, dict):
                raise MalformedFrame(line)
            name = _need(item, "name", str, line)
            width = _need(item, "width", int, line)
            if width < 1:
                raise MalformedFrame(f"width must be >= 1: {line}")
            ports.append((name, width))
        return Hello(design=design, ports=tuple(ports))
    if kind == "request":
        cycle = _need(doc, "cycle", int, line)
        coverage = _need(doc, "coverage", str, line)
        if cycle < 0:
            raise MalformedFrame(f"negative cycle: {line}")
        try:
            value = Fraction(coverage)
        except (ValueError, ZeroDivisionError):
            raise MalformedFrame(f"bad coverage: {line}") from None
        if not 0 <= value <= 100:
            raise MalformedFrame(f"coverage out of range: {line}")
        return Request(cycle=cycle, coverage=coverage)
    if kind == "stimulus":
        values_raw = _need(doc, "values", list, line)
        values = []
        for item in values_raw:
            if not isinstance(item, dict):
                raise MalformedFrame(line)
            port = _need(item, "port", str, line)
            bits = _need(item, "bits", str, line)
            if not bits or any(c not in "01" for c in bits):
                raise MalformedFrame(f"bad bits: {line}")
            values.append((port, bits))
        return Stimulus(values=tuple(values))
    if kind == "done":
        return Done(reason=_need(doc, "reason", str, line))
    if kind == "error":
        return Error(code=_need(doc, "code", str, line),
                     detail=str(doc.get("detail", "")))
    raise MalformedFrame(line)
