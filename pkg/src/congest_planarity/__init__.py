"""Distributed property testing of planarity in a simulated CONGEST network."""

from __future__ import annotations

from .engine import Engine, Reject, Trace, default_budget, run
from .graph import Graph, RotationSystem, load_graph, save_graph
from .planarity import TesterConfig, Verdict, run_full_tester, run_tester

__version__ = "0.1.0"

__all__ = [
    "Engine",
    "Graph",
    "Reject",
    "RotationSystem",
    "TesterConfig",
    "Trace",
    "Verdict",
    "__version__",
    "default_budget",
    "load_graph",
    "run",
    "run_full_tester",
    "run_tester",
    "save_graph",
]
