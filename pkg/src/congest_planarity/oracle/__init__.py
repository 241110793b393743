"""Centralized ground truth used to check the distributed algorithms."""

from __future__ import annotations

from .dmp import planar_rotation
from .metrics import (
    AtLeast,
    IntractableInstance,
    PartitionReport,
    PartReport,
    distance_to_cycle_freeness,
    distance_to_planarity,
    distance_to_property,
    induced_diameter,
    is_bipartite,
    is_forest,
    stretch,
    verify_partition,
)
from .planar import (
    EmbeddingWithFaces,
    embed,
    has_k5_minor,
    has_k33_minor,
    is_planar,
    kuratowski_planar,
    planar,
)
from .violations import (
    FundamentalCycle,
    decompose_cycle,
    enumerate_violations,
    fundamental_cycle,
    node_sides,
    violation_pairs_for,
)

__all__ = [
    "AtLeast",
    "EmbeddingWithFaces",
    "FundamentalCycle",
    "IntractableInstance",
    "PartReport",
    "PartitionReport",
    "decompose_cycle",
    "distance_to_cycle_freeness",
    "distance_to_planarity",
    "distance_to_property",
    "embed",
    "enumerate_violations",
    "fundamental_cycle",
    "has_k5_minor",
    "has_k33_minor",
    "induced_diameter",
    "is_bipartite",
    "is_forest",
    "is_planar",
    "kuratowski_planar",
    "node_sides",
    "planar",
    "planar_rotation",
    "stretch",
    "verify_partition",
    "violation_pairs_for",
]
