"""Exact reference answers: max-flow based connectivity and subset enumeration.

The flow-based oracles run one exact max-flow per candidate sink and are
fine up to a few hundred vertices.  The enumeration helpers are
exponential and guarded to ``n <= 20``; they evaluate every subset at once
with numpy bit tricks.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .graph import (
    CutResult,
    GraphError,
    NoCut,
    VertexWeightedDigraph,
    Weight,
    WeightedDigraph,
    edge_cut,
    reachable,
    reverse,
    vertex_cut,
)
from .instrument import Counters
from .maxflow import FlowNetwork, vertex_max_flow

MAX_ENUM_N = 20
_CHUNK = 1 << 16


def _exact(value: int, denominator: int) -> Weight:
    if denominator == 1:
        return int(value)
    q = Fraction(int(value), denominator)
    return q.numerator if q.denominator == 1 else q


def _best(cuts) -> CutResult:
    return min(cuts, key=CutResult.sort_key)


def exact_rooted_ec(g: WeightedDigraph, root: int, counters: Counters | None = None) -> CutResult:
    """Minimum edge ``root``-cut via ``n - 1`` max-flows."""
    if g.n < 2:
        raise GraphError("need at least two vertices")
    if not 0 <= root < g.n:
        raise GraphError(f"root {root} out of range")
    net = FlowNetwork(g, counters)
    cuts = []
    everything = frozenset(range(g.n))
    for t in range(g.n):
        if t == root:
            continue
        res = net.solve(root, t)
        cuts.append(edge_cut(g, root, everything - res.source_side))
    return _best(cuts)


def exact_rooted_vc(g: VertexWeightedDigraph, root: int, counters: Counters | None = None) -> CutResult:
    """Minimum vertex ``root``-cut; raises :class:`NoCut` when the root dominates."""
    if g.n < 2:
        raise GraphError("need at least two vertices")
    sinks = g.eligible_sinks(root)
    if not sinks:
        raise NoCut(f"root {root} has an edge to every other vertex")
    everything = frozenset(range(g.n))
    cuts = []
    for t in sorted(sinks):
        res = vertex_max_flow(g, root, t, counters)
        cuts.append(vertex_cut(g, root, everything - res.source_side - res.separator))
    return _best(cuts)


def map_reversed_cut(g, cut: CutResult) -> CutResult:
    """Turn a cut of ``reverse(g)`` into a cut of ``g`` of no larger weight.

    A sink component ``T`` of the reversed graph is a source side in
    ``g``: the new sink is the part of ``V`` that still reaches the old
    root, and the new root is ``min`` of what is left over.
    """
    T = cut.sink_component
    if cut.kind == "edge":
        sink = frozenset(range(g.n)) - T
        out = edge_cut(g, min(T), sink)
    else:
        sep = cut.cut_elements
        # vertices that reach the old root in g without touching the separator
        sink = frozenset(reachable(g.n, g.in_neighbors, cut.root, sep))
        rest = frozenset(range(g.n)) - sink - sep
        out = vertex_cut(g, min(rest), sink)
    if out.weight > cut.weight:
        raise AssertionError("reversed cut grew when mapped back")
    return out


def exact_global_ec(g: WeightedDigraph, counters: Counters | None = None) -> CutResult:
    """Global minimum edge cut: vertex 0 as root in ``g`` and in ``reverse(g)``."""
    a = exact_rooted_ec(g, 0, counters)
    b = map_reversed_cut(g, exact_rooted_ec(reverse(g), 0, counters))
    return _best([a, b])


def exact_global_vc(g: VertexWeightedDigraph, counters: Counters | None = None) -> CutResult:
    """Global minimum vertex cut: the best rooted cut over every root."""
    cuts = []
    for r in range(g.n):
        try:
            cuts.append(exact_rooted_vc(g, r, counters))
        except NoCut:
            continue
    if not cuts:
        raise NoCut("every vertex has an edge to every other vertex")
    return _best(cuts)


# -- subset enumeration --------------------------------------------------------


def _masks(n: int, excluded: int):
    """All nonempty subsets of ``range(n) - {excluded}`` as int64 bitmasks, in chunks."""
    others = [v for v in range(n) if v != excluded]
    total = 1 << len(others)
    for lo in range(1, total, _CHUNK):
        idx = np.arange(lo, min(total, lo + _CHUNK), dtype=np.int64)
        out = np.zeros_like(idx)
        for j, v in enumerate(others):
            out |= ((idx >> j) & 1) << v
        yield out


def _edge_in_cuts(g: WeightedDigraph, masks: np.ndarray) -> np.ndarray:
    W = g.scaled_weights
    total = np.zeros(len(masks), dtype=object if sum(W) >= 1 << 62 else np.int64)
    for u, v, w in zip(g.tails, g.heads, W):
        hit = ((masks >> v) & 1) & (1 - ((masks >> u) & 1))
        total += hit * w
    return total


def _vertex_in_cuts(g: VertexWeightedDigraph, root: int, masks: np.ndarray):
    """Scaled separator weights and validity for every mask."""
    D = g.denominator
    W = [int(w * D) for w in g.vertex_weights]
    total = np.zeros(len(masks), dtype=np.int64)
    valid = np.ones(len(masks), dtype=bool)
    for u in range(g.n):
        out = 0
        for v in g.out_neighbors[u]:
            out |= 1 << v
        if not out:
            continue
        touches = ((masks & out) != 0) & (((masks >> u) & 1) == 0)
        if u == root:
            valid &= ~touches
        else:
            total += touches * W[u]
    return total, valid


def _guard(n: int) -> None:
    if n > MAX_ENUM_N:
        raise GraphError(f"enumeration is limited to n <= {MAX_ENUM_N}, got {n}")


def enumerate_edge_cuts(g: WeightedDigraph, root: int):
    """Yield ``(mask, scaled_weight)`` arrays covering every nonempty ``S`` avoiding ``root``.

    Weights are multiplied by ``g.denominator``.
    """
    _guard(g.n)
    for masks in _masks(g.n, root):
        yield masks, _edge_in_cuts(g, masks)


def enumerate_vertex_cuts(g: VertexWeightedDigraph, root: int):
    """Yield ``(mask, scaled_weight, valid)`` for every nonempty ``S`` avoiding ``root``."""
    _guard(g.n)
    for masks in _masks(g.n, root):
        w, ok = _vertex_in_cuts(g, root, masks)
        yield masks, w, ok


def mask_to_set(mask: int) -> frozenset[int]:
    mask = int(mask)
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return frozenset(out)


def _popcount(masks: np.ndarray) -> np.ndarray:
    return np.array([int(x).bit_count() for x in masks.tolist()], dtype=np.int64)


def sink_constrained_cut(g, root: int, t: int, k: int) -> Weight | None:
    """Lightest in-cut over sets ``S`` with ``t in S``, ``|S| <= k``, ``root not in S``.

    Works for both graph kinds.  For vertex graphs only sets whose
    separator avoids the root count; ``None`` means no such set exists.
    """
    _guard(g.n)
    if t == root:
        raise GraphError("t must differ from the root")
    if k < 1:
        raise GraphError("k must be positive")
    vertex = isinstance(g, VertexWeightedDigraph)
    best = None
    for masks in _masks(g.n, root):
        keep = ((masks >> t) & 1).astype(bool)
        if k < g.n:
            keep &= _popcount(masks) <= k
        if not keep.any():
            continue
        sub = masks[keep]
        if vertex:
            w, ok = _vertex_in_cuts(g, root, sub)
            w = w[ok]
        else:
            w = _edge_in_cuts(g, sub)
        if len(w):
            m = int(w.min())
            best = m if best is None else min(best, m)
    if best is None:
        return None
    return _exact(best, g.denominator)


def brute_rooted_cut(g, root: int) -> Weight | None:
    """Minimum rooted cut by full subset enumeration (either kind)."""
    _guard(g.n)
    vertex = isinstance(g, VertexWeightedDigraph)
    best = None
    for masks in _masks(g.n, root):
        if vertex:
            w, ok = _vertex_in_cuts(g, root, masks)
            w = w[ok]
        else:
            w = _edge_in_cuts(g, masks)
        if len(w):
            m = int(w.min())
            best = m if best is None else min(best, m)
    return None if best is None else _exact(best, g.denominator)
