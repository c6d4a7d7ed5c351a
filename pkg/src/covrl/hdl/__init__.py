"""Verilog-2005 subset frontend: parsing, port extraction, FSM detection."""

from covrl.hdl.design import DesignIR, parse_design
from covrl.hdl.fsm import FsmDescriptor, detect_fsms
from covrl.hdl.ports import (
    PortSpec,
    PortSpecSet,
    emit_port_spec,
    extract_ports,
    load_port_spec,
)

__all__ = [
    "DesignIR",
    "FsmDescriptor",
    "PortSpec",
    "PortSpecSet",
    "detect_fsms",
    "emit_port_spec",
    "extract_ports",
    "load_port_spec",
    "parse_design",
]
