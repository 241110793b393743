"""Graph representation, serialization and instance generators."""

from __future__ import annotations

from .core import Edge, Graph, GraphError, RotationSystem, cyclically_between, norm_edge
from .generators import (
    FarInstance,
    default_density_scale,
    gen_far_family,
    gen_lower_bound_instance,
    gen_random_planar,
    girth,
    lower_bound_c,
    lower_bound_girth_target,
)
from .io import (
    GraphParseError,
    format_graph,
    load_graph,
    load_sidecar,
    parse_graph,
    save_graph,
    save_sidecar,
    sidecar_path,
)

__all__ = [
    "Edge",
    "FarInstance",
    "Graph",
    "GraphError",
    "GraphParseError",
    "RotationSystem",
    "cyclically_between",
    "default_density_scale",
    "format_graph",
    "gen_far_family",
    "gen_lower_bound_instance",
    "gen_random_planar",
    "girth",
    "load_graph",
    "load_sidecar",
    "lower_bound_c",
    "lower_bound_girth_target",
    "norm_edge",
    "parse_graph",
    "save_graph",
    "save_sidecar",
    "sidecar_path",
]
