"""Primary-port metadata: extraction, role inference, and serialization."""

from __future__ import annotations

import json
import logging
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from covrl.errors import ConfigError, UnknownPort
from covrl.hdl.design import DesignIR

log = logging.getLogger(__name__)

CLOCK_NAMES = ("clk", "clock")
RESET_NAMES = ("rst", "reset", "rst_n")
DIRECTIONS = ("input", "output", "inout")
ROLES = ("clock", "reset", "data")


@dataclass(frozen=True)
class PortSpec:
    name: str
    direction: str
    width: int
    role: str = "data"

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise ConfigError(f"bad direction {self.direction!r} for port {self.name!r}")
        if self.role not in ROLES:
            raise ConfigError(f"bad role {self.role!r} for port {self.name!r}")
        if self.width < 1:
            raise ConfigError(f"port {self.name!r} must be at least 1 bit wide")

    @property
    def msb(self) -> int:
        return self.width - 1

    @property
    def active_low(self) -> bool:
        """Reset polarity by naming convention."""
        return self.role == "reset" and self.name.lower().endswith("_n")


@dataclass
class PortSpecSet:
    design_name: str
    ports: list[PortSpec] = field(default_factory=list)

    def __post_init__(self):
        names = [p.name for p in self.ports]
        if len(names) != len(set(names)):
            raise ConfigError("duplicate port names")
        for role in ("clock", "reset"):
            if sum(1 for p in self.ports if p.role == role) > 1:
                raise ConfigError(f"more than one {role} port")

    def get(self, name: str) -> PortSpec:
        for p in self.ports:
            if p.name == name:
                return p
        raise UnknownPort(name)

    @property
    def clock(self) -> PortSpec | None:
        return next((p for p in self.ports if p.role == "clock"), None)

    @property
    def reset(self) -> PortSpec | None:
        return next((p for p in self.ports if p.role == "reset"), None)

    @property
    def inputs(self) -> list[PortSpec]:
        return [p for p in self.ports if p.direction == "input"]

    @property
    def data_inputs(self) -> list[PortSpec]:
        return [p for p in self.ports if p.direction == "input" and p.role == "data"]


def extract_ports(ir: DesignIR, clock: str | None = None,
                  reset: str | None = None) -> PortSpecSet:
    """Build the PortSpecSet, inferring clock/reset roles by name.

    A 1-bit input named clk/clock (case-insensitive) becomes the clock; the
    first match in declaration order wins and later matches are demoted to
    data with a warning. rst/reset/rst_n likewise for the reset role. The
    `clock`/`reset` arguments override inference.
    """
    specs: list[PortSpec] = []
    clock_taken = False
    reset_taken = False
    for port in ir.ports:
        role = "data"
        if clock is not None or reset is not None:
            if port.name == clock:
                role = "clock"
            elif port.name == reset:
                role = "reset"
        else:
            lowered = port.name.lower()
            if port.direction == "input" and port.width == 1 and lowered in CLOCK_NAMES:
                if clock_taken:
                    log.warning("demoting extra clock-named port %r to data", port.name)
                else:
                    role = "clock"
                    clock_taken = True
            elif port.direction == "input" and port.width == 1 and lowered in RESET_NAMES:
                if reset_taken:
                    log.warning("demoting extra reset-named port %r to data", port.name)
                else:
                    role = "reset"
                    reset_taken = True
        specs.append(PortSpec(name=port.name, direction=port.direction,
                              width=port.width, role=role))
    if clock is not None and not any(p.role == "clock" for p in specs):
        raise UnknownPort(clock, f"clock override {clock!r} names no port")
    if reset is not None and not any(p.role == "reset" for p in specs):
        raise UnknownPort(reset, f"reset override {reset!r} names no port")
    return PortSpecSet(design_name=ir.name, ports=specs)


def emit_port_spec(ports: PortSpecSet, format: str = "xml") -> str:
    """Serialize deterministically; XML is indented, JSON is compact."""
    if format == "xml":
        lines = [f'<design name="{ports.design_name}">']
        for p in ports.ports:
            lines.append(
                f'  <port name="{p.name}" direction="{p.direction}" '
                f'width="{p.width}" role="{p.role}"/>'
            )
        lines.append("</design>")
        return "\n".join(lines) + "\n"
    if format == "json":
        doc = {
            "design": ports.design_name,
            "ports": [
                {"name": p.name, "direction": p.direction, "width": p.width, "role": p.role}
                for p in ports.ports
            ],
        }
        return json.dumps(doc, separators=(",", ":"))
    raise ConfigError(f"unknown port spec format {format!r}")


def load_port_spec(text: str) -> PortSpecSet:
    """Parse a serialized port spec, accepting either emitted format."""
    stripped = text.strip()
    if stripped.startswith("{"):
        doc = json.loads(stripped)
        return PortSpecSet(
            design_name=doc["design"],
            ports=[PortSpec(name=p["name"], direction=p["direction"],
                            width=int(p["width"]), role=p["role"])
                   for p in doc["ports"]],
        )
    root = ET.fromstring(stripped)
    if root.tag != "design":
        raise ConfigError("port spec XML must have a <design> root")
    return PortSpecSet(
        design_name=root.attrib["name"],
        ports=[PortSpec(name=el.attrib["name"], direction=el.attrib["direction"],
                        width=int(el.attrib["width"]), role=el.attrib["role"])
               for el in root.findall("port")],
    )
