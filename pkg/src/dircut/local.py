"""Local Ford-Fulkerson structures for small-sink rooted cuts.

The structure is built once per (graph, root, guess) on a sparsified copy
of the graph and then answers many independent ``(root, t)`` queries.  A
query pushes flow from ``t`` to the root in the *reversed* sparsified graph,
so the set of vertices still residual-reachable from ``t`` at the end is a
sink component in the original orientation.

Every vertex carries an escape arc to the root (its auxiliary edge).  The
search stops as soon as it meets a vertex whose escape arc still has room
and finishes the path through it; a vertex is *saturated* once its escape
arc is full.  Because every saturated escape arc accounts for a fixed
quantum of flow, only a few vertices are ever saturated and each search
stays short.

In the vertex variant the search runs on the split graph of the reversed
graph, where each auxiliary path ``v+ -> a_v- -> a_v+ -> r-`` is collapsed
to one arc ``(v+, r-)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .graph import (
    INVALID,
    GraphError,
    VertexWeightedDigraph,
    Weight,
    WeightedDigraph,
    in_cut_weight,
    vertex_in_cut,
)
from .instrument import Counters
from .sparsify import (
    SparsifiedGraph,
    SparsifiedVertexGraph,
    SparsifyParams,
    sparsify_edge,
    sparsify_vertex,
)

ABOVE = "above"
CUT = "cut"

# c in the (lambda, k, c * eps) call to the sparsifier
DEFAULT_C_LOCAL = Fraction(1, 2)
DEFAULT_ITER_FACTOR = 4
DEFAULT_BUDGET_FACTOR = 16


class BudgetExceeded(AssertionError):
    """A single augmenting-path search examined more arcs than its budget allows."""


@dataclass(frozen=True)
class LocalQueryAnswer:
    """Outcome of one local query.

    On the ``"cut"`` branch ``sink_component`` holds original vertex ids,
    ``weight`` is its exact in-cut weight in the input graph and
    ``sparse_weight`` the rescaled cut value found in the sparsified graph.
    On the ``"above"`` branch those are ``None`` and ``reason`` says why.
    """

    t: int
    verdict: str
    sink_component: Optional[frozenset[int]] = None
    weight: Optional[Weight] = None
    sparse_weight: Optional[Fraction] = None
    flow_units: int = 0
    reason: str = ""
    separator: Optional[frozenset[int]] = None

    @property
    def above(self) -> bool:
        return self.verdict == ABOVE


@dataclass
class SaturationStats:
    """Results of the per-iteration saturation and degree checks."""

    checks: int = 0
    violations: int = 0
    max_saturated: int = 0
    max_search: int = 0


class LocalCutStructure:
    """Immutable residual template plus the query procedure.

    Queries keep their residual capacities in a private dict layered over
    the template, so the structure itself is never modified (apart from
    the statistics counters it was handed).
    """

    def __init__(
        self,
        kind: str,
        original,
        root: int,
        params: SparsifyParams,
        eps: Fraction,
        sparse,
        *,
        strict: bool = False,
        counters: Counters | None = None,
        iter_factor=DEFAULT_ITER_FACTOR,
        budget_factor=DEFAULT_BUDGET_FACTOR,
    ):
        self.kind = kind
        self.original = original
        self.root = root
        self.params = params
        self.eps = Fraction(eps)
        self.sparse = sparse
        self.strict = strict
        self.counters = counters if counters is not None else Counters()
        self.stats = SaturationStats()
        d = sparse.derived
        self.tau = sparse.tau
        k = params.k_guess
        e2 = float(params.eps) ** 2
        self.target = math.floor((1 + self.eps / 2) * d.lambda_units) + 1
        self.max_iterations = math.ceil(float(iter_factor) * float(params.c_w) * k * d.log_n / e2)
        self.budget = math.ceil(float(budget_factor) * k * k * d.log_n / e2)
        self.aux_quantum = min(d.aux_units, d.cap)
        # arrays filled by the builders below
        self.head: list[int] = []
        self.base: list[int] = []
        self.adj: list[tuple[int, ...]] = []
        self.escape: list[int] = []
        self.internal: list[int] = []
        self.aux_arcs: frozenset[int] = frozenset()
        self.sink_node = -1
        self.degenerate = False

    # -- template construction -------------------------------------------------

    def _finish(self, nodes: int, arcs: list[tuple[int, int, int]]) -> None:
        head, base = [], []
        buckets: list[list[tuple[int, int]]] = [[] for _ in range(nodes)]
        for tail, hd, c in arcs:
            a = len(head)
            head += (hd, tail)
            base += (c, 0)
            buckets[tail].append((hd, a))
            buckets[hd].append((tail, a + 1))
        self.head = head
        self.base = base
        self.adj = [tuple(a for _, a in sorted(b)) for b in buckets]
        self.initial_outdeg = [sum(1 for a in adj if base[a] > 0) for adj in self.adj]

    # -- queries ---------------------------------------------------------------

    def _cap(self, res: dict, a: int) -> int:
        return res.get(a, self.base[a])

    def _shortcut(self, res: dict, x: int):
        esc = self.escape[x]
        if esc >= 0 and res.get(esc, self.base[esc]) > 0:
            return (esc,)
        if self.kind == "vertex" and not x & 1:
            i = self.internal[x]
            esc = self.escape[x + 1]
            if i >= 0 and esc >= 0 and res.get(i, self.base[i]) > 0 and res.get(esc, self.base[esc]) > 0:
                return (i, esc)
        return None

    def _search(self, res: dict, src: int):
        """Depth-first search for an augmenting path; lowest head id first.

        Returns ``(path, visited, scans)`` where ``path`` is a list of arcs
        or ``None`` when the sink is unreachable.
        """
        base, head, adj = self.base, self.head, self.adj
        sink = self.sink_node
        tail = self._shortcut(res, src)
        if tail is not None:
            return list(tail), {src}, 0
        visited = {src}
        parent: dict[int, int] = {}
        stack = [src]
        ptr = {src: 0}
        scans = 0
        budget = self.budget
        while stack:
            x = stack[-1]
            arcs = adj[x]
            i = ptr[x]
            pushed = False
            while i < len(arcs):
                a = arcs[i]
                i += 1
                if res.get(a, base[a]) <= 0:
                    continue
                scans += 1
                if scans > budget:
                    raise BudgetExceeded(f"search examined more than {budget} residual arcs")
                y = head[a]
                if y in visited:
                    continue
                parent[y] = a
                if y == sink:
                    return self._trace(parent, src, y, ()), visited, scans
                visited.add(y)
                tail = self._shortcut(res, y)
                if tail is not None:
                    return self._trace(parent, src, y, tail), visited, scans
                ptr[x] = i
                ptr[y] = 0
                stack.append(y)
                pushed = True
                break
            if not pushed:
                ptr[x] = i
                stack.pop()
        return None, visited, scans

    def _trace(self, parent: dict, src: int, y: int, tail) -> list[int]:
        path = list(tail)
        rev = []
        head = self.head
        while y != src:
            a = parent[y]
            rev.append(a)
            y = head[a ^ 1]
        rev.reverse()
        return rev + path

    def _source(self, t: int) -> int:
        raise NotImplementedError

    def _prepare(self, res: dict, src: int) -> None:
        """Hook for per-query template tweaks (vertex variant lifts the source)."""

    def _check(self, res: dict, flow: int, iterations: int, path, saturated: set, src: int, src_deg: int) -> None:
        st = self.stats
        st.checks += 1
        bad = []
        if len(saturated) * self.aux_quantum > flow:
            bad.append(f"{len(saturated)} saturated escape arcs with flow {flow}")
        st.max_saturated = max(st.max_saturated, len(saturated))
        base, head = self.base, self.head
        for a in path:
            x = head[a ^ 1]
            deg = sum(1 for b in self.adj[x] if res.get(b, base[b]) > 0)
            start = src_deg if x == src else self.initial_outdeg[x]
            if deg > start + iterations:
                bad.append(f"node {x} residual out-degree {deg} exceeds {start} + {iterations}")
        if self.kind == "vertex":
            total = 0
            for v in self._touched_in_nodes(res):
                i, esc = self.internal[v], self.escape[v + 1]
                if i < 0 or esc < 0:
                    continue
                if res.get(i, base[i]) == 0 and res.get(esc, base[esc]) > 0:
                    total += sum(1 for b in self.adj[v] if res.get(b, base[b]) > 0)
            if total > flow:
                bad.append(f"saturated in-vertices have total out-degree {total} > flow {flow}")
        if bad:
            st.violations += len(bad)
            self.counters["local.violations"] += len(bad)
            if self.strict:
                raise AssertionError("; ".join(bad))

    def _touched_in_nodes(self, res: dict):
        internal_of = self._internal_owner
        return {internal_of[a] for a in res if a in internal_of}

    def query(self, t: int) -> LocalQueryAnswer:
        self.counters["local.queries"] += 1
        if self.degenerate:
            return LocalQueryAnswer(t, ABOVE, reason="degenerate")
        src = self._source(t)
        if src < 0:
            return LocalQueryAnswer(t, ABOVE, reason="contracted")
        res: dict[int, int] = {}
        self._prepare(res, src)
        base, aux_arcs = self.base, self.aux_arcs
        src_deg = sum(1 for a in self.adj[src] if res.get(a, base[a]) > 0)
        limit = min(self.target, self.max_iterations)
        flow = 0
        iterations = 0
        saturated: set[int] = set()
        total_scans = 0
        try:
            while True:
                path, visited, scans = self._search(res, src)
                total_scans += scans
                self.stats.max_search = max(self.stats.max_search, scans)
                if path is None:
                    break
                b = min(res.get(a, base[a]) for a in path)
                b = min(b, limit - flow)
                for a in path:
                    res[a] = res.get(a, base[a]) - b
                    res[a ^ 1] = res.get(a ^ 1, base[a ^ 1]) + b
                    if a in aux_arcs and res[a] == 0:
                        saturated.add(a)
                flow += b
                iterations += 1
                self.counters["local.augmentations"] += 1
                if self.strict:
                    self._check(res, flow, iterations, path, saturated, src, src_deg)
                if flow >= limit:
                    reason = "threshold" if flow >= self.target else "iterations"
                    return LocalQueryAnswer(t, ABOVE, flow_units=flow, reason=reason)
        except BudgetExceeded:
            if self.strict:
                raise
            return LocalQueryAnswer(t, ABOVE, flow_units=flow, reason="budget")
        finally:
            self.counters["local.arc_scans"] += total_scans
        sparse_weight = self.tau * flow
        if sparse_weight > (1 + self.eps / 2) * self.params.lambda_guess:
            return LocalQueryAnswer(t, ABOVE, flow_units=flow, reason="threshold")
        return self._answer(t, visited, flow, sparse_weight)

    def _answer(self, t, visited, flow, sparse_weight) -> LocalQueryAnswer:
        raise NotImplementedError


class _EdgeStructure(LocalCutStructure):
    def _build(self) -> None:
        sg: SparsifiedGraph = self.sparse
        g = sg.graph
        if sg.degenerate:
            self.degenerate = True
            return
        arcs = [(h, t, w) for t, h, w in zip(g.tails, g.heads, g.weights)]
        self._finish(g.n, arcs)
        # arc 2i is the reversal of sparsified edge i
        self.escape = [2 * e if e >= 0 else -1 for e in sg.aux_edge]
        self.aux_arcs = frozenset(x for x in self.escape if x >= 0)
        self.sink_node = sg.root
        self._internal_owner = {}

    def _source(self, t: int) -> int:
        if t == self.root:
            raise GraphError("t must differ from the root")
        if not 0 <= t < self.original.n:
            raise GraphError(f"vertex {t} out of range")
        return self.sparse.index.get(t, -1)

    def _answer(self, t, visited, flow, sparse_weight) -> LocalQueryAnswer:
        sink = self.sparse.to_original(visited)
        self.counters["eval.edges"] += sum(self.original.in_degree(v) for v in sink)
        return LocalQueryAnswer(
            t,
            CUT,
            sink_component=sink,
            weight=in_cut_weight(self.original, sink),
            sparse_weight=sparse_weight,
            flow_units=flow,
        )


class _VertexStructure(LocalCutStructure):
    def _build(self) -> None:
        sv: SparsifiedVertexGraph = self.sparse
        g = sv.graph
        n0 = sv.original_n
        r = sv.root
        w = g.vertex_weights
        if not sv.eligible_sinks:
            self.degenerate = True
            return
        is_aux = {a: v for v, a in sv.aux_vertex.items()}
        nodes = 2 * n0
        arcs: list[tuple[int, int, int]] = []
        internal = [-1] * nodes
        escape = [-1] * nodes
        aux_arcs = []
        for v in range(n0):
            if v != r and w[v] > 0:
                internal[2 * v] = 2 * len(arcs)
                arcs.append((2 * v, 2 * v + 1, w[v]))
        for u, v in zip(g.tails, g.heads):
            if u in is_aux or v in is_aux or v == r:
                continue
            # G-edge (u, v) reverses to (v, u) and splits to (v+, u-) carrying w(v);
            # zero-capacity copies stay so that a weight-0 source can be lifted
            if u == r:
                escape[2 * v + 1] = 2 * len(arcs)
            arcs.append((2 * v + 1, 2 * u, w[v]))
        for v, a in sv.aux_vertex.items():
            if v in sv.rewired or w[a] <= 0:
                continue
            escape[2 * v + 1] = 2 * len(arcs)
            aux_arcs.append(2 * len(arcs))
            arcs.append((2 * v + 1, 2 * r, w[a]))
        self._finish(nodes, arcs)
        self.internal = internal
        self.escape = escape
        self.aux_arcs = frozenset(aux_arcs)
        self.sink_node = 2 * r
        self._internal_owner = {a: 2 * v for v in range(n0) if (a := internal[2 * v]) >= 0}

    def _source(self, t: int) -> int:
        if not 0 <= t < self.original.n:
            raise GraphError(f"vertex {t} out of range")
        if t not in self.original.eligible_sinks(self.root):
            raise GraphError(f"vertex {t} is the root or one of its out-neighbours")
        if t not in self.sparse.eligible_sinks:
            return -1
        return 2 * t + 1

    def _prepare(self, res: dict, src: int) -> None:
        # flow leaving the source never pays the source's own weight
        for a in self.adj[src]:
            if not a & 1 and a != self.escape[src]:
                res[a] = self.target

    def _answer(self, t, visited, flow, sparse_weight) -> LocalQueryAnswer:
        base, head = self.base, self.head
        n0 = self.sparse.original_n
        sep = set()
        for x in visited:
            for a in self.adj[x]:
                if a & 1 or base[a] <= 0 or head[a] in visited or a in self.aux_arcs:
                    continue
                # internal arc names its vertex, a cross arc (x+, y-) names x
                sep.add(x // 2)
        sink = frozenset(x // 2 for x in visited if x & 1 and x // 2 < n0) - sep
        g = self.original
        self.counters["eval.edges"] += sum(len(g.in_neighbors[v]) for v in sink)
        separator, weight = vertex_in_cut(g, self.root, sink)
        if weight == INVALID:
            if self.strict:
                raise AssertionError(f"sink component of t={t} is adjacent to the root")
            return LocalQueryAnswer(t, ABOVE, flow_units=flow, reason="invalid")
        return LocalQueryAnswer(
            t,
            CUT,
            sink_component=sink,
            weight=weight,
            sparse_weight=sparse_weight,
            flow_units=flow,
            separator=separator,
        )


def _local_params(p: SparsifyParams, c_local) -> SparsifyParams:
    return p.with_(eps=p.eps * Fraction(c_local))


def build_local_ec(
    g: WeightedDigraph,
    root: int,
    p: SparsifyParams,
    *,
    c_local=DEFAULT_C_LOCAL,
    strict: bool = False,
    counters: Counters | None = None,
    **limits,
) -> LocalCutStructure:
    """Sparsify ``g`` with accuracy ``c_local * p.eps`` and build the edge query structure."""
    if not 0 <= root < g.n:
        raise GraphError(f"root {root} out of range")
    lp = _local_params(p, c_local)
    sg = sparsify_edge(g, root, lp, counters)
    s = _EdgeStructure("edge", g, root, lp, p.eps, sg, strict=strict, counters=counters, **limits)
    s._build()
    return s


def query_ec(s: LocalCutStructure, t: int) -> LocalQueryAnswer:
    return s.query(t)


def build_local_vc(
    g: VertexWeightedDigraph,
    root: int,
    p: SparsifyParams,
    *,
    c_local=DEFAULT_C_LOCAL,
    strict: bool = False,
    counters: Counters | None = None,
    sparse: SparsifiedVertexGraph | None = None,
    **limits,
) -> LocalCutStructure:
    """Vertex analogue of :func:`build_local_ec`.

    A ready sparsification (e.g. from a deferred core, built with
    ``c_local * p.eps``) can be passed as ``sparse``.
    """
    if not 0 <= root < g.n:
        raise GraphError(f"root {root} out of range")
    lp = _local_params(p, c_local)
    if sparse is None:
        sparse = sparsify_vertex(g, root, lp, counters)
    s = _VertexStructure("vertex", g, root, lp, p.eps, sparse, strict=strict, counters=counters, **limits)
    s._build()
    return s


def query_vc(s: LocalCutStructure, t: int) -> LocalQueryAnswer:
    return s.query(t)
