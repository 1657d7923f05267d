"""Certified-quality menu solver.

Profit-maximizing menus of certificate quality and targeted views for a
platform selling content moderation, with planner / single-certificate /
two-certificate / enforced-perfect benchmarks, comparative statics, welfare
analysis, and brute-force oracles.
"""

from ._certmenu import *  # noqa: F401,F403
from ._certmenu import oracle  # noqa: F401

__version__ = "0.1.0"
