"""Evaluation harness: max-coverage probes, single runs, and comparisons."""

from covrl.experiment.maxcov import MaxCoverageRecord, find_max_coverage
from covrl.experiment.runner import RunRecord, default_agent_config, run_one
from covrl.experiment.compare import compare, SUMMARY_COLUMNS

__all__ = [
    "MaxCoverageRecord",
    "RunRecord",
    "SUMMARY_COLUMNS",
    "compare",
    "default_agent_config",
    "find_max_coverage",
    "run_one",
]
