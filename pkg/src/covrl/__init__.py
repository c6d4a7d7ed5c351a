"""covrl: coverage-directed stimulus generation with reinforcement learning.

Parse a synthesizable Verilog subset, simulate it cycle by cycle with
coverage instrumentation, and let an RL agent (or a random baseline) drive
the input ports toward maximum coverage.
"""

__version__ = "0.1.0"
