"""Directed graph containers, transforms and exact cut evaluation.

Vertices are the integers ``0..n-1``.  Weights are exact rationals: plain
``int`` when integral, :class:`fractions.Fraction` otherwise.  Parallel edges
are kept as distinct edges; self-loops are dropped at construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from numbers import Rational
from typing import Iterable, Union

Weight = Union[int, Fraction]

INVALID = math.inf


def as_weight(value) -> Weight:
    """Convert ``value`` to an exact rational weight.

    Floats go through their shortest decimal repr, so ``0.1`` becomes
    ``1/10`` rather than the binary expansion.
    """
    if isinstance(value, bool):
        raise TypeError("boolean is not a weight")
    if isinstance(value, int):
        return value
    if isinstance(value, Rational):
        q = Fraction(value)
    elif isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"weight must be finite, got {value!r}")
        q = Fraction(repr(value))
    elif isinstance(value, str):
        q = Fraction(value.strip())
    else:
        raise TypeError(f"unsupported weight type {type(value).__name__}")
    return q.numerator if q.denominator == 1 else q


def _lcm_denominator(values: Iterable[Weight]) -> int:
    d = 1
    for w in values:
        if isinstance(w, Fraction) and w.denominator != 1:
            d = math.lcm(d, w.denominator)
    return d


@dataclass(frozen=True, eq=False)
class WeightedDigraph:
    """Edge-weighted directed multigraph.

    ``tails[i] -> heads[i]`` is edge ``i`` with weight ``weights[i]``.
    """

    n: int
    tails: tuple[int, ...]
    heads: tuple[int, ...]
    weights: tuple[Weight, ...]

    @property
    def m(self) -> int:
        return len(self.tails)

    @cached_property
    def out_edges(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for i, u in enumerate(self.tails):
            adj[u].append(i)
        return tuple(tuple(a) for a in adj)

    @cached_property
    def in_edges(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for i, v in enumerate(self.heads):
            adj[v].append(i)
        return tuple(tuple(a) for a in adj)

    @cached_property
    def denominator(self) -> int:
        """Least common denominator of all weights."""
        return _lcm_denominator(self.weights)

    @cached_property
    def scaled_weights(self) -> tuple[int, ...]:
        """Weights multiplied by :attr:`denominator`, as exact integers."""
        d = self.denominator
        if d == 1:
            return tuple(int(w) for w in self.weights)
        return tuple(int(w * d) for w in self.weights)

    def edges(self) -> list[tuple[int, int, Weight]]:
        return list(zip(self.tails, self.heads, self.weights))

    def in_degree(self, v: int) -> int:
        return len(self.in_edges[v])

    def out_degree(self, v: int) -> int:
        return len(self.out_edges[v])

    def weighted_in_degree(self, v: int) -> Weight:
        w = self.weights
        return sum((w[e] for e in self.in_edges[v]), 0)

    def reversed(self) -> WeightedDigraph:
        return WeightedDigraph(self.n, self.heads, self.tails, self.weights)

    def structurally_equal(self, other: WeightedDigraph) -> bool:
        return (
            self.n == other.n
            and self.tails == other.tails
            and self.heads == other.heads
            and self.weights == other.weights
        )

    def canonical(self) -> tuple:
        """Order-independent form of the edge multiset, for comparisons."""
        return (self.n, tuple(sorted(zip(self.tails, self.heads, self.weights))))

    def __repr__(self) -> str:
        return f"WeightedDigraph(n={self.n}, m={self.m})"


@dataclass(frozen=True, eq=False)
class VertexWeightedDigraph:
    """Directed graph with weights on vertices.

    Weight 0 is tolerated only in derived (sparsified) graphs; graphs coming
    from :func:`build_vertex_graph` have strictly positive weights.
    """

    n: int
    tails: tuple[int, ...]
    heads: tuple[int, ...]
    vertex_weights: tuple[Weight, ...]

    @property
    def m(self) -> int:
        return len(self.tails)

    @cached_property
    def out_neighbors(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in zip(self.tails, self.heads):
            adj[u].append(v)
        return tuple(tuple(a) for a in adj)

    @cached_property
    def in_neighbors(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in zip(self.tails, self.heads):
            adj[v].append(u)
        return tuple(tuple(a) for a in adj)

    @cached_property
    def denominator(self) -> int:
        return _lcm_denominator(self.vertex_weights)

    @cached_property
    def total_weight(self) -> Weight:
        return sum(self.vertex_weights, 0)

    def edges(self) -> list[tuple[int, int]]:
        return list(zip(self.tails, self.heads))

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.out_neighbors[u]

    def out_degree(self, v: int) -> int:
        """Number of distinct out-neighbours."""
        return len(set(self.out_neighbors[v]))

    def eligible_sinks(self, root: int) -> frozenset[int]:
        """``V - ({root} + N+(root))``: vertices that can sit in a sink component."""
        out = set(self.out_neighbors[root])
        out.add(root)
        return frozenset(v for v in range(self.n) if v not in out)

    def reversed(self) -> VertexWeightedDigraph:
        return VertexWeightedDigraph(self.n, self.heads, self.tails, self.vertex_weights)

    def canonical(self) -> tuple:
        return (self.n, self.vertex_weights, tuple(sorted(zip(self.tails, self.heads))))

    def __repr__(self) -> str:
        return f"VertexWeightedDigraph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class SplitMapping:
    """Vertex ``v`` becomes ``in_vertex[v] -> out_vertex[v]`` through edge ``internal_edge[v]``."""

    in_vertex: tuple[int, ...]
    out_vertex: tuple[int, ...]
    internal_edge: tuple[int, ...]

    def original(self, split_vertex: int) -> int:
        return split_vertex // 2


@dataclass(frozen=True)
class CutResult:
    """A rooted cut and its exact weight in the graph it was evaluated on.

    ``kind`` is ``"edge"`` (``cut_elements`` are edge ids) or ``"vertex"``
    (``cut_elements`` are vertex ids).
    """

    sink_component: frozenset[int]
    cut_elements: frozenset[int]
    weight: Weight
    root: int
    kind: str = "edge"

    def sort_key(self) -> tuple:
        return (self.weight, len(self.sink_component), tuple(sorted(self.sink_component)))


class GraphError(ValueError):
    """Raised for malformed graph input."""


class NoCut(Exception):
    """No cut of the requested kind exists (e.g. the root dominates every vertex)."""


def build_graph(n: int, edge_list: Iterable[tuple[int, int, object]]) -> WeightedDigraph:
    """Validate an edge list and build a :class:`WeightedDigraph`."""
    if not isinstance(n, int) or n < 1:
        raise GraphError(f"vertex count must be a positive integer, got {n!r}")
    tails: list[int] = []
    heads: list[int] = []
    weights: list[Weight] = []
    for idx, item in enumerate(edge_list):
        try:
            u, v, w = item
        except (TypeError, ValueError):
            raise GraphError(f"edge {idx}: expected (tail, head, weight), got {item!r}") from None
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge {idx}: endpoint out of range in ({u}, {v}) for n={n}")
        try:
            w = as_weight(w)
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise GraphError(f"edge {idx}: bad weight {item[2]!r}: {exc}") from None
        if w <= 0:
            raise GraphError(f"edge {idx}: weight must be positive, got {w}")
        if u == v:
            continue
        tails.append(int(u))
        heads.append(int(v))
        weights.append(w)
    return WeightedDigraph(n, tuple(tails), tuple(heads), tuple(weights))


def build_vertex_graph(
    n: int, vertex_weights: Iterable[object], edge_list: Iterable[tuple[int, int]]
) -> VertexWeightedDigraph:
    """Validate and build a :class:`VertexWeightedDigraph`; self-loops are dropped."""
    if not isinstance(n, int) or n < 1:
        raise GraphError(f"vertex count must be a positive integer, got {n!r}")
    ws = []
    for v, w in enumerate(vertex_weights):
        try:
            w = as_weight(w)
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise GraphError(f"vertex {v}: bad weight: {exc}") from None
        if w <= 0:
            raise GraphError(f"vertex {v}: weight must be positive, got {w}")
        ws.append(w)
    if len(ws) != n:
        raise GraphError(f"expected {n} vertex weights, got {len(ws)}")
    tails: list[int] = []
    heads: list[int] = []
    for idx, item in enumerate(edge_list):
        u, v = item[0], item[1]
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge {idx}: endpoint out of range in ({u}, {v}) for n={n}")
        if u == v:
            continue
        tails.append(int(u))
        heads.append(int(v))
    return VertexWeightedDigraph(n, tuple(tails), tuple(heads), tuple(ws))


def reverse(g):
    """Reverse every edge of an edge- or vertex-weighted digraph."""
    return g.reversed()


def contract_into_root(
    g: WeightedDigraph, root: int, absorbed: Iterable[int]
) -> tuple[WeightedDigraph, dict[int, int]]:
    """Merge ``absorbed`` into ``root``.

    Survivors are relabelled ``0..n'-1`` in increasing original order; the
    returned mapping sends each surviving original id to its new id.
    Edges that become self-loops disappear.
    """
    absorbed = set(absorbed)
    if root in absorbed:
        raise GraphError("root cannot be absorbed into itself")
    mapping: dict[int, int] = {}
    for v in range(g.n):
        if v not in absorbed:
            mapping[v] = len(mapping)
    new_root = mapping[root]
    tails: list[int] = []
    heads: list[int] = []
    weights: list[Weight] = []
    for u, v, w in zip(g.tails, g.heads, g.weights):
        a = new_root if u in absorbed else mapping[u]
        b = new_root if v in absorbed else mapping[v]
        if a == b:
            continue
        tails.append(a)
        heads.append(b)
        weights.append(w)
    return WeightedDigraph(len(mapping), tuple(tails), tuple(heads), tuple(weights)), mapping


def split_graph(
    g: VertexWeightedDigraph, source: int | None = None
) -> tuple[WeightedDigraph, SplitMapping]:
    """Model vertex capacities with edge capacities.

    Vertex ``v`` becomes ``2v -> 2v+1`` (edge id ``v``) with capacity ``w(v)``.
    Edge ``(u, v)`` becomes ``(2u+1, 2v)`` with capacity ``w(u)``.  Flow out of
    ``source``'s out-vertex does not pass through ``source``'s own capacity,
    so when ``source`` is given its outgoing copies get an effectively
    unbounded capacity (total weight + 1).
    """
    n = g.n
    w = g.vertex_weights
    tails = [2 * v for v in range(n)]
    heads = [2 * v + 1 for v in range(n)]
    weights = list(w)
    big = g.total_weight + 1
    for u, v in zip(g.tails, g.heads):
        tails.append(2 * u + 1)
        heads.append(2 * v)
        weights.append(big if u == source else w[u])
    mapping = SplitMapping(
        in_vertex=tuple(2 * v for v in range(n)),
        out_vertex=tuple(2 * v + 1 for v in range(n)),
        internal_edge=tuple(range(n)),
    )
    return WeightedDigraph(2 * n, tuple(tails), tuple(heads), tuple(weights)), mapping


def in_cut_weight(g: WeightedDigraph, s: Iterable[int]) -> Weight:
    """Total weight of edges entering ``s`` from outside."""
    s = s if isinstance(s, (set, frozenset)) else set(s)
    tails, w = g.tails, g.weights
    total: Weight = 0
    for v in s:
        for e in g.in_edges[v]:
            if tails[e] not in s:
                total += w[e]
    return total


def entering_edges(g: WeightedDigraph, s: Iterable[int]) -> frozenset[int]:
    s = s if isinstance(s, (set, frozenset)) else set(s)
    tails = g.tails
    return frozenset(e for v in s for e in g.in_edges[v] if tails[e] not in s)


def vertex_in_cut(
    g: VertexWeightedDigraph, root: int, s: Iterable[int]
) -> tuple[frozenset[int], Weight | float]:
    """Separator ``N-(s) - s`` and its weight.

    If the root has an edge straight into ``s`` no vertex cut induces ``s``;
    the weight is then :data:`INVALID` (infinity) and the returned set
    excludes the root.
    """
    s = s if isinstance(s, (set, frozenset)) else set(s)
    if root in s:
        raise GraphError("root cannot be in the sink component")
    sep: set[int] = set()
    for v in s:
        for u in g.in_neighbors[v]:
            if u not in s:
                sep.add(u)
    if root in sep:
        sep.discard(root)
        return frozenset(sep), INVALID
    w = g.vertex_weights
    return frozenset(sep), sum((w[u] for u in sep), 0)


def reachable(n: int, adjacency, start: int, blocked: frozenset[int] | set[int] = frozenset()) -> set[int]:
    """Vertices reachable from ``start`` via ``adjacency[v]`` neighbour lists, avoiding ``blocked``."""
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v in adjacency[u]:
            if v not in seen and v not in blocked:
                seen.add(v)
                stack.append(v)
    return seen


def edge_successors(g: WeightedDigraph) -> list[list[int]]:
    heads = g.heads
    return [[heads[e] for e in out] for out in g.out_edges]


def edge_cut(g: WeightedDigraph, root: int, sink: Iterable[int]) -> CutResult:
    """Build the :class:`CutResult` induced by ``sink`` in ``g``."""
    sink = frozenset(sink)
    if not sink or root in sink:
        raise GraphError("sink component must be nonempty and exclude the root")
    cut = entering_edges(g, sink)
    w = g.weights
    return CutResult(sink, cut, sum((w[e] for e in cut), 0), root, "edge")


def vertex_cut(g: VertexWeightedDigraph, root: int, sink: Iterable[int]) -> CutResult:
    """Build the vertex :class:`CutResult` induced by ``sink``; raises if invalid."""
    sink = frozenset(sink)
    if not sink:
        raise GraphError("sink component must be nonempty")
    sep, weight = vertex_in_cut(g, root, sink)
    if weight == INVALID:
        raise GraphError("root has an edge into the sink component")
    return CutResult(sink, sep, weight, root, "vertex")


def is_valid_edge_cut(g: WeightedDigraph, cut: CutResult) -> bool:
    """Check every invariant of an edge :class:`CutResult` against ``g``."""
    if not cut.sink_component or cut.root in cut.sink_component:
        return False
    if cut.cut_elements != entering_edges(g, cut.sink_component):
        return False
    return cut.weight == in_cut_weight(g, cut.sink_component)


def is_valid_vertex_cut(g: VertexWeightedDigraph, cut: CutResult) -> bool:
    """Check every invariant of a vertex :class:`CutResult` against ``g``."""
    sink = cut.sink_component
    if not sink or cut.root in sink:
        return False
    sep, weight = vertex_in_cut(g, cut.root, sink)
    if weight == INVALID or sep != cut.cut_elements or weight != cut.weight:
        return False
    # removing the separator must really disconnect the sink from the root
    reach = reachable(g.n, g.out_neighbors, cut.root, cut.cut_elements)
    return not (reach & sink)
