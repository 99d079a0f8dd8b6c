"""Approximate minimum rooted and global cuts in directed graphs."""

from .graph import (
    CutResult,
    GraphError,
    NoCut,
    VertexWeightedDigraph,
    WeightedDigraph,
    build_graph,
    build_vertex_graph,
    in_cut_weight,
    reverse,
    split_graph,
    vertex_in_cut,
)
from .instrument import Counters
from .io import ParseError, format_graph, parse_graph
from .local import LocalQueryAnswer, build_local_ec, build_local_vc, query_ec, query_vc
from .maxflow import FlowResult, max_flow, vertex_max_flow
from .oracle import exact_global_ec, exact_global_vc, exact_rooted_ec, exact_rooted_vc
from .rooted import (
    ApproxCutReport,
    DriverConfig,
    approx_global_ec,
    approx_global_vc,
    approx_rooted_ec,
    approx_rooted_vc,
    rooted_ec_big_sink,
    rooted_ec_small_sink,
    rooted_vc_big_sink,
    rooted_vc_small_sink,
)
from .sparsify import SparsifyParams, sparsify_edge, sparsify_vertex

__all__ = [
    "ApproxCutReport",
    "Counters",
    "CutResult",
    "DriverConfig",
    "FlowResult",
    "GraphError",
    "LocalQueryAnswer",
    "NoCut",
    "ParseError",
    "SparsifyParams",
    "VertexWeightedDigraph",
    "WeightedDigraph",
    "approx_global_ec",
    "approx_global_vc",
    "approx_rooted_ec",
    "approx_rooted_vc",
    "build_graph",
    "build_local_ec",
    "build_local_vc",
    "build_vertex_graph",
    "exact_global_ec",
    "exact_global_vc",
    "exact_rooted_ec",
    "exact_rooted_vc",
    "format_graph",
    "in_cut_weight",
    "max_flow",
    "parse_graph",
    "query_ec",
    "query_vc",
    "reverse",
    "rooted_ec_big_sink",
    "rooted_ec_small_sink",
    "rooted_vc_big_sink",
    "rooted_vc_small_sink",
    "sparsify_edge",
    "sparsify_vertex",
    "split_graph",
    "vertex_in_cut",
]
