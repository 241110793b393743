"""Per-part planarity checks: BFS trees, labels, cycle sides and violations."""

from __future__ import annotations

from .labels import (
    CycleDescriptor,
    EndpointInfo,
    Order,
    Side,
    classify_point,
    edge_side_at_cycle_node,
    endpoint_side,
    is_violation,
    lex_compare,
    make_descriptor,
)
from .stage import (
    TesterConfig,
    TesterRun,
    Verdict,
    run_full_tester,
    run_stage2,
    run_tester,
    sample_nontree_edges,
    sample_size,
)
from .tree import BfsTree, Labeling, build_bfs_tree, compute_labels

__all__ = [
    "BfsTree",
    "CycleDescriptor",
    "EndpointInfo",
    "Labeling",
    "Order",
    "Side",
    "TesterConfig",
    "TesterRun",
    "Verdict",
    "build_bfs_tree",
    "classify_point",
    "compute_labels",
    "edge_side_at_cycle_node",
    "endpoint_side",
    "is_violation",
    "lex_compare",
    "make_descriptor",
    "run_full_tester",
    "run_stage2",
    "run_tester",
    "sample_nontree_edges",
    "sample_size",
]
