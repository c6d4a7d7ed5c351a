"""Cycle-based two-state simulator with per-cycle coverage instrumentation."""

from covrl.sim.bits import BitVector
from covrl.sim.coverage import CoverageDB, CoverageSnapshot, coverage_score, write_coverage_dump
from covrl.sim.simulator import SimInstance, elaborate, step_cycle

__all__ = [
    "BitVector",
    "CoverageDB",
    "CoverageSnapshot",
    "SimInstance",
    "coverage_score",
    "elaborate",
    "step_cycle",
    "write_coverage_dump",
]
