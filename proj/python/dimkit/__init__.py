"""Heuristic-guided diffusion sampling toolkit over analytic toy models.

Thin python surface over the C++ core: noise schedules, PF-ODE solvers,
morphing pipelines (unguided, candidate search, greedy search, greedy
optimization), identity heuristics, RAdam, vulnerability metrics, and the
experiment runner.
"""

from ._core import *  # noqa: F401,F403

__version__ = "0.1.0"
