"""Exact (s, t) maximum flow / minimum cut.

Dinic's algorithm on a flat residual-arc layout.  Edge ``i`` of the input
owns arcs ``2i`` (forward) and ``2i+1`` (residual twin), so ``a ^ 1`` is
always the partner arc.  The kernel is compiled with numba when the integer
capacities fit comfortably in 64 bits and runs as plain Python otherwise.

The returned minimum cut is the source-minimal one: the vertices reachable
from ``s`` in the final residual graph.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .graph import (
    GraphError,
    NoCut,
    VertexWeightedDigraph,
    Weight,
    WeightedDigraph,
    reachable,
    split_graph,
)
from .instrument import Counters

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_INT64_HEADROOM = 1 << 62


def _dinic_kernel(start, arcs, head, cap, s, t, cutoff):
    n = start.shape[0] - 1
    level = np.full(n, -1, np.int64)
    it = np.zeros(n, np.int64)
    queue = np.zeros(n, np.int64)
    path = np.zeros(n, np.int64)
    flow = 0
    scans = 0
    while True:
        for i in range(n):
            level[i] = -1
        level[s] = 0
        qh = 0
        qt = 1
        queue[0] = s
        while qh < qt:
            u = queue[qh]
            qh += 1
            for j in range(start[u], start[u + 1]):
                a = arcs[j]
                scans += 1
                if cap[a] > 0:
                    v = head[a]
                    if level[v] < 0:
                        level[v] = level[u] + 1
                        queue[qt] = v
                        qt += 1
        if level[t] < 0:
            return flow, scans, level, False
        for i in range(n):
            it[i] = start[i]
        depth = 0
        u = s
        while True:
            if u == t:
                b = cap[path[0]]
                for i in range(1, depth):
                    c = cap[path[i]]
                    if c < b:
                        b = c
                if cutoff > 0 and flow + b > cutoff:
                    b = cutoff - flow
                for i in range(depth):
                    a = path[i]
                    cap[a] -= b
                    cap[a ^ 1] += b
                flow += b
                if cutoff > 0 and flow >= cutoff:
                    return flow, scans, level, True
                depth = 0
                u = s
                continue
            advanced = False
            end = start[u + 1]
            while it[u] < end:
                a = arcs[it[u]]
                scans += 1
                v = head[a]
                if cap[a] > 0 and level[v] == level[u] + 1:
                    path[depth] = a
                    depth += 1
                    u = v
                    advanced = True
                    break
                it[u] += 1
            if not advanced:
                if u == s:
                    break
                level[u] = -1
                depth -= 1
                a = path[depth]
                u = head[a ^ 1]
                it[u] += 1


if numba is not None:
    _dinic_jit = numba.njit(cache=True)(_dinic_kernel)
else:  # pragma: no cover
    _dinic_jit = _dinic_kernel


@dataclass(frozen=True)
class FlowResult:
    """Maximum flow value and the source-minimal minimum cut.

    ``value`` is in the scale of the input weights.  ``min_cut_edges`` are
    the ids of the input edges leaving ``source_side``.
    """

    value: Weight
    source_side: frozenset[int]
    min_cut_edges: frozenset[int]


class FlowNetwork:
    """Residual-arc layout of a :class:`WeightedDigraph` reusable across (s, t) queries.

    Capacities are the graph's weights scaled to integers by their common
    denominator.  Each :meth:`solve` call works on a private copy.
    """

    def __init__(self, g: WeightedDigraph, counters: Counters | None = None):
        self.graph = g
        self.counters = counters
        self.denominator = g.denominator
        caps = g.scaled_weights
        m = len(caps)
        self.tails = np.asarray(g.tails, dtype=np.int64)
        self.heads = np.asarray(g.heads, dtype=np.int64)
        head = np.empty(2 * m, np.int64)
        head[0::2] = self.heads
        head[1::2] = self.tails
        arc_tail = np.empty(2 * m, np.int64)
        arc_tail[0::2] = self.tails
        arc_tail[1::2] = self.heads
        order = np.argsort(arc_tail, kind="stable")
        start = np.zeros(g.n + 1, np.int64)
        np.cumsum(np.bincount(arc_tail, minlength=g.n), out=start[1:])
        self.head = head
        self.arcs = order.astype(np.int64)
        self.start = start
        total = sum(caps)
        self.fast = total < _INT64_HEADROOM
        if self.fast:
            base = np.zeros(2 * m, np.int64)
            base[0::2] = np.asarray(caps, dtype=np.int64)
        else:
            base = [0] * (2 * m)
            base[0::2] = list(caps)
        self.base = base
        self.int_caps = caps

    def solve_raw(self, s: int, t: int, cutoff: int = 0):
        """Run Dinic from ``s`` to ``t`` in integer units.

        Returns ``(value, reach, truncated)``: ``reach`` marks the residual
        side of ``s``; with ``cutoff > 0`` the search stops once the flow
        reaches ``cutoff`` and ``truncated`` is set (``reach`` is then
        meaningless).
        """
        if s == t:
            raise GraphError("source and sink must differ")
        if self.fast:
            cap = self.base.copy()
            value, scans, level, truncated = _dinic_jit(self.start, self.arcs, self.head, cap, s, t, cutoff)
            value = int(value)
        else:
            cap = list(self.base)
            value, scans, level, truncated = _dinic_kernel(self.start, self.arcs, self.head, cap, s, t, cutoff)
        reach = level >= 0
        if not truncated:
            self._verify(value, reach)
        if self.counters is not None:
            self.counters["flow.calls"] += 1
            self.counters["flow.arc_scans"] += int(scans)
            if truncated:
                self.counters["flow.truncated"] += 1
        return value, reach, bool(truncated)

    def _verify(self, value: int, reach: np.ndarray) -> None:
        """Max-flow equals min-cut, checked on every completed solve."""
        cut = np.nonzero(reach[self.tails] & ~reach[self.heads])[0]
        if self.fast:
            cut_value = int(self.base[0::2][cut].sum())
        else:
            caps = self.int_caps
            cut_value = sum(caps[i] for i in cut.tolist())
        if cut_value != value:
            raise AssertionError(f"flow/cut mismatch: flow {value} vs cut {cut_value}")
        if self.counters is not None:
            self.counters["flow.verified"] += 1

    def solve(self, s: int, t: int) -> FlowResult:
        value, reach, _ = self.solve_raw(s, t)
        cut = np.nonzero(reach[self.tails] & ~reach[self.heads])[0]
        d = self.denominator
        scaled = value if d == 1 else Fraction(value, d)
        if isinstance(scaled, Fraction) and scaled.denominator == 1:
            scaled = scaled.numerator
        return FlowResult(
            value=scaled,
            source_side=frozenset(np.nonzero(reach)[0].tolist()),
            min_cut_edges=frozenset(cut.tolist()),
        )


def max_flow(g: WeightedDigraph, s: int, t: int, counters: Counters | None = None) -> FlowResult:
    """Exact maximum ``s``-``t`` flow and a minimum cut of ``g``.

    If ``t`` is unreachable the value is 0 and ``source_side`` is the set of
    vertices reachable from ``s``.
    """
    if not (0 <= s < g.n and 0 <= t < g.n):
        raise GraphError(f"terminal out of range for n={g.n}")
    return FlowNetwork(g, counters).solve(s, t)


@dataclass(frozen=True)
class VertexFlowResult:
    """Minimum ``s``-``t`` vertex separator.

    ``source_side`` holds the vertices still reachable from ``s`` once the
    separator is removed; everything else outside the separator is cut off.
    """

    value: Weight
    separator: frozenset[int]
    source_side: frozenset[int]


def separator_from_split_cut(
    g: VertexWeightedDigraph, split: WeightedDigraph, cut_edges
) -> frozenset[int]:
    """Map cut edges of ``split_graph(g)`` back to vertices of ``g``.

    Internal edges name their vertex; an edge ``(u+, v-)`` stands for ``u``,
    whose capacity it carries.
    """
    n = g.n
    sep = set()
    for e in cut_edges:
        if e < n:
            sep.add(e)
        else:
            sep.add(split.tails[e] // 2)
    return frozenset(sep)


class VertexFlowNetwork:
    """Split-graph flow network for many ``(s, t)`` vertex-cut queries from one source ``s``."""

    def __init__(self, g: VertexWeightedDigraph, s: int, counters: Counters | None = None):
        if not 0 <= s < g.n:
            raise GraphError(f"source {s} out of range")
        self.graph = g
        self.source = s
        self.split, self.mapping = split_graph(g, source=s)
        self.net = FlowNetwork(self.split, counters)

    def value(self, t: int, cutoff: int = 0) -> tuple[int, bool]:
        """Scaled min separator value, or ``(cutoff, True)`` once it reaches ``cutoff``."""
        if self.graph.has_edge(self.source, t):
            raise NoCut(f"edge ({self.source}, {t}) admits no vertex cut")
        value, _, truncated = self.net.solve_raw(
            self.mapping.out_vertex[self.source], self.mapping.in_vertex[t], cutoff
        )
        return value, truncated

    def solve(self, t: int) -> VertexFlowResult:
        g, s = self.graph, self.source
        if s == t:
            raise GraphError("source and sink must differ")
        if g.has_edge(s, t):
            raise NoCut(f"edge ({s}, {t}) admits no vertex cut")
        res = self.net.solve(self.mapping.out_vertex[s], self.mapping.in_vertex[t])
        sep = separator_from_split_cut(g, self.split, res.min_cut_edges)
        w = g.vertex_weights
        sep_weight = sum((w[v] for v in sep), 0)
        if sep_weight != res.value or s in sep or t in sep:
            raise AssertionError(f"separator weight {sep_weight} disagrees with flow {res.value}")
        side = reachable(g.n, g.out_neighbors, s, sep)
        return VertexFlowResult(value=res.value, separator=sep, source_side=frozenset(side))


def vertex_max_flow(
    g: VertexWeightedDigraph, s: int, t: int, counters: Counters | None = None
) -> VertexFlowResult:
    """Minimum weight set of vertices (other than ``s``, ``t``) separating ``t`` from ``s``."""
    if s == t:
        raise GraphError("source and sink must differ")
    return VertexFlowNetwork(g, s, counters).solve(t)
