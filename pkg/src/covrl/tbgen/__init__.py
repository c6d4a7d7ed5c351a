"""Template-driven testbench generation."""

from covrl.tbgen.engine import Template, render
from covrl.tbgen.testbench import default_template, render_testbench
from covrl.tbgen.svcheck import sv_syntax_problems

__all__ = [
    "Template",
    "default_template",
    "render",
    "render_testbench",
    "sv_syntax_problems",
]
