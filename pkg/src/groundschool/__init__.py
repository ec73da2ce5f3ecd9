"""Interactive concept learning on a simulated tabletop.

The package stacks an analogical concept memory (structure mapping over fact
cases, incremental probabilistic generalization) under a small language-capable
agent that lives in a qualitative 2-D world, plus an evaluation harness, an
HTTP teaching service, and a CLI.
"""

__version__ = "0.1.0"
