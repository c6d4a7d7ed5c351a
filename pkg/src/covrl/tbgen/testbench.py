"""SystemVerilog testbench rendering from a port specification.

The generated bench instantiates the DUV with every port connected, runs a
clock generator for the clock-role port, imports the DPI socket client, and
loops: report coverage, request a stimulus, drive each data input, wait one
clock edge. Benches are golden-file tested and syntax smoke checked, never
simulated in this repo.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from covrl.errors import EmptyPortSet
from covrl.hdl.ports import PortSpec, PortSpecSet
from covrl.tbgen.engine import Template

TEMPLATE_DIR = Path(__file__).parent / "templates"


@dataclass
class PortItem:
    name: str
    direction: str
    width: int
    role: str
    msb: int
    comma: str  # separator when rendered inside a connection list
    assert_level: str = ""
    deassert_level: str = ""

    @property
    def is_input(self) -> bool:
        return self.direction == "input"


def _item(port: PortSpec, comma: str) -> PortItem:
    active_low = port.active_low
    return PortItem(
        name=port.name,
        direction=port.direction,
        width=port.width,
        role=port.role,
        msb=port.width - 1,
        comma=comma,
        assert_level="1'b0" if active_low else "1'b1",
        deassert_level="1'b1" if active_low else "1'b0",
    )


def _items(ports: list[PortSpec]) -> list[PortItem]:
    out = []
    for i, port in enumerate(ports):
        out.append(_item(port, "," if i + 1 < len(ports) else ""))
    return out


def build_model(ports: PortSpecSet) -> dict:
    clock = ports.clock
    reset = ports.reset
    return {
        "design_name": ports.design_name,
        "ports": _items(ports.ports),
        "inputs": _items(ports.inputs),
        "outputs": _items([p for p in ports.ports if p.direction == "output"]),
        "data_inputs": _items(ports.data_inputs),
        "clock": _item(clock, "") if clock else None,
        "reset": _item(reset, "") if reset else None,
    }


def default_template() -> Template:
    text = (TEMPLATE_DIR / "testbench.sv.tmpl").read_text(encoding="utf-8")
    return Template(text)


def render_testbench(ports: PortSpecSet, template: Template | None = None) -> str:
    if not ports.ports:
        raise EmptyPortSet(ports.design_name)
    if template is None:
        template = default_template()
    return template.render(build_model(ports))
