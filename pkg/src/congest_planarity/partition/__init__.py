"""Partition of a graph into connected low-diameter parts by iterated contraction."""

from __future__ import annotations

from .emulation import AuxRunner, Mem
from .stage import (
    ARBORICITY_EXCEEDED,
    AuxWeightedGraph,
    Partitioner,
    PartitionState,
    PhaseConfig,
    PhaseStats,
    Stage1Result,
    cv_iterations,
    cv_reduce,
    fd_rounds,
    mark_decision,
    marked_edges,
    phase_count,
    run_stage1,
    three_color,
)

__all__ = [
    "ARBORICITY_EXCEEDED",
    "AuxRunner",
    "AuxWeightedGraph",
    "Mem",
    "PartitionState",
    "Partitioner",
    "PhaseConfig",
    "PhaseStats",
    "Stage1Result",
    "cv_iterations",
    "cv_reduce",
    "fd_rounds",
    "mark_decision",
    "marked_edges",
    "phase_count",
    "run_stage1",
    "three_color",
]
