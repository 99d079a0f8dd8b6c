"""Randomized sparsification that preserves small-sink rooted cuts.

Both reductions follow the same recipe, parameterized by an accuracy
``eps``, a connectivity guess ``lambda_guess`` and a sink-size guess ``k``:

1. round every weight to a multiple of ``tau`` with an unbiased coin flip,
2. attach every vertex to the root with an auxiliary element of weight
   ``eps * lambda / 2k`` (an edge, or a fresh vertex on a two-edge path),
3. divide by ``tau`` so all weights are integers,
4. truncate weights at ``c_w k ln n / eps^2``,
5. fold vertices whose unweighted in-degree reaches ``Delta`` into the root
   (edge variant) or feed them straight from the root (vertex variant).

``tau`` is shrunk to the largest value not above ``c_tau eps^2 lambda / (k ln n)``
that divides both ``lambda`` and ``eps lambda / 2k`` exactly, so the
auxiliary weight and the guess are integers after rescaling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import rng as rngmod
from .graph import (
    GraphError,
    VertexWeightedDigraph,
    Weight,
    WeightedDigraph,
    as_weight,
)
from .instrument import Counters


def _as_fraction(x) -> Fraction:
    return Fraction(as_weight(x))


def rational_gcd(a: Fraction, b: Fraction) -> Fraction:
    """Largest rational ``g`` with ``a/g`` and ``b/g`` both integers."""
    a, b = Fraction(a), Fraction(b)
    return Fraction(
        math.gcd(a.numerator * b.denominator, b.numerator * a.denominator),
        a.denominator * b.denominator,
    )


def log_n(n: int) -> float:
    """Natural log of ``n``, floored at 1."""
    return max(1.0, math.log(n)) if n > 1 else 1.0


@dataclass(frozen=True)
class Derived:
    """Quantities fixed once the vertex count is known."""

    log_n: float
    tau: Fraction
    lambda_units: int
    aux_units: int
    delta: int
    cap: int


@dataclass(frozen=True)
class SparsifyParams:
    """Accuracy, guesses and tuning constants for one sparsification.

    Defaults keep ``c_w * c_tau >= c_clamp`` (truncation never pushes a cut
    below ``c_clamp * lambda``) and ``c_delta * c_tau > 3`` (no vertex of a
    light, small sink reaches the contraction threshold).
    """

    eps: Fraction
    lambda_guess: Fraction
    k_guess: int
    c_tau: Fraction = Fraction(1, 64)
    c_delta: Fraction = Fraction(256)
    c_w: Fraction = Fraction(128)
    c_clamp: Fraction = Fraction(2)
    rng_seed: int = 0

    def __post_init__(self):
        for name in ("eps", "lambda_guess", "c_tau", "c_delta", "c_w", "c_clamp"):
            object.__setattr__(self, name, _as_fraction(getattr(self, name)))
        if not 0 < self.eps < 1:
            raise ValueError(f"eps must lie in (0, 1), got {self.eps}")
        if self.lambda_guess <= 0:
            raise ValueError("lambda_guess must be positive")
        if int(self.k_guess) != self.k_guess or self.k_guess < 1:
            raise ValueError("k_guess must be a positive integer")
        if min(self.c_tau, self.c_delta, self.c_w, self.c_clamp) <= 0:
            raise ValueError("tuning constants must be positive")
        if self.c_w * self.c_tau < self.c_clamp:
            raise ValueError("need c_w * c_tau >= c_clamp, or truncation destroys light cuts")

    @property
    def c_zero(self) -> Fraction:
        """Union-bound exponent: a fixed set ``S`` fails with probability ``n^(-c_zero |S|)``."""
        return 1 / (2 * self.c_tau)

    @property
    def aux_weight(self) -> Fraction:
        return self.eps * self.lambda_guess / (2 * self.k_guess)

    def derive(self, n: int) -> Derived:
        L = log_n(n)
        eps, lam, k = self.eps, self.lambda_guess, self.k_guess
        aux = self.aux_weight
        g = rational_gcd(lam, aux)
        # tau = g / N with N the smallest integer making tau <= c_tau eps^2 lam / (k L)
        ratio = float(g / lam) * k * L / float(self.c_tau * eps * eps)
        N = max(1, math.ceil(ratio - 1e-12))
        tau = g / N
        inv_eps2 = 1.0 / float(eps * eps)
        delta = max(1, math.ceil(float(self.c_delta) * k * L * inv_eps2))
        cap = max(1, math.floor(float(self.c_w) * k * L * inv_eps2))
        return Derived(
            log_n=L,
            tau=tau,
            lambda_units=int(lam / tau),
            aux_units=int(aux / tau),
            delta=delta,
            cap=cap,
        )

    def with_(self, **changes) -> SparsifyParams:
        data = {f: getattr(self, f) for f in self.__dataclass_fields__}
        data.update(changes)
        return SparsifyParams(**data)


def _round_units(numer: int, denom: int, u: float) -> int:
    f, r = divmod(numer, denom)
    if r and u < r / denom:
        f += 1
    return f


def importance_round(w, tau, rng) -> Weight:
    """Round ``w`` to ``tau * (floor(w/tau) + B)``, ``B ~ Bernoulli(frac(w/tau))``.

    The result is unbiased and within ``tau`` of ``w``.
    """
    w = Fraction(as_weight(w))
    tau = Fraction(as_weight(tau))
    if w <= 0 or tau <= 0:
        raise ValueError("weight and tau must be positive")
    q = w / tau
    units = _round_units(q.numerator, q.denominator, float(rng.random()))
    out = tau * units
    return out.numerator if out.denominator == 1 else out


def _unit_scale(denominator: int, tau: Fraction) -> tuple[int, int]:
    """``(mult, den)`` with ``w / tau == scaled_w * mult / den``."""
    return tau.denominator, denominator * tau.numerator


@dataclass(frozen=True, eq=False)
class SparsifiedGraph:
    """Integer-weight graph produced by :func:`sparsify_edge`.

    Vertex ids are compacted; ``survivors[i]`` is the original id of vertex
    ``i`` and ``index`` inverts it.  ``aux_edge[i]`` is the id of the (merged)
    edge ``(root, i)``, or ``-1`` for the root.  Multiply unit weights by
    ``tau`` to get back to the input scale.

    ``padded`` is the intermediate graph on the original ids, in units,
    right after the auxiliary edges are added (before truncation and
    contraction).
    """

    graph: WeightedDigraph
    tau: Fraction
    root: int
    aux_edge: tuple[int, ...]
    survivors: tuple[int, ...]
    index: dict[int, int]
    params: SparsifyParams
    derived: Derived
    contracted: frozenset[int] = field(default_factory=frozenset)
    padded: WeightedDigraph | None = None

    @property
    def degenerate(self) -> bool:
        """True when every vertex was folded into the root (no candidate sinks)."""
        return self.graph.n <= 1

    def to_original(self, vertices) -> frozenset[int]:
        s = self.survivors
        return frozenset(s[v] for v in vertices)

    def rescale(self, units) -> Fraction:
        return self.tau * units

    def check_invariants(self) -> list[str]:
        """Deterministic structural properties; returns the violated ones."""
        g, d = self.graph, self.derived
        bad = []
        if any(not isinstance(w, int) or not 1 <= w <= d.cap for w in g.weights):
            bad.append("weights: integer weights in [1, cap]")
        if any(len(ie) > d.delta for ie in g.in_edges):
            bad.append("degree: unweighted in-degree at most delta")
        for v in range(g.n):
            if v == self.root:
                continue
            e = self.aux_edge[v]
            if e < 0 or g.tails[e] != self.root or g.heads[e] != v or g.weights[e] < min(d.aux_units, d.cap):
                bad.append(f"aux-edge: vertex {v} lacks its root attachment")
                break
            if sum(1 for x in g.in_edges[v] if g.tails[x] == self.root) != 1:
                bad.append(f"aux-edge: vertex {v} has parallel root edges")
                break
        return bad


def sparsify_edge(
    g: WeightedDigraph, root: int, p: SparsifyParams, counters: Counters | None = None
) -> SparsifiedGraph:
    """Sparsify ``g`` for rooted edge cuts with sink size about ``p.k_guess``."""
    n = g.n
    if not 0 <= root < n:
        raise GraphError(f"root {root} out of range")
    d = p.derive(n)
    mult, den = _unit_scale(g.denominator, d.tau)
    gen = rngmod.generator(p.rng_seed, rngmod.SPARSIFY_EDGE)
    draws = gen.random(g.m).tolist()
    W = g.scaled_weights
    tails, heads = g.tails, g.heads
    cap = d.cap

    # rounding, dropping zeros, merging existing root edges into the attachments
    from_root = [0] * n
    et: list[int] = []
    eh: list[int] = []
    ew: list[int] = []
    raw: list[int] = []
    for e in range(g.m):
        units = _round_units(W[e] * mult, den, draws[e])
        if units == 0:
            continue
        if tails[e] == root:
            from_root[heads[e]] += units
            continue
        if heads[e] == root:
            # never part of a rooted cut
            continue
        et.append(tails[e])
        eh.append(heads[e])
        raw.append(units)
        ew.append(min(units, cap))
    padded_aux = [0 if v == root else d.aux_units + from_root[v] for v in range(n)]
    others = [v for v in range(n) if v != root]
    padded = WeightedDigraph(
        n,
        tuple(et) + (root,) * len(others),
        tuple(eh) + tuple(others),
        tuple(raw) + tuple(padded_aux[v] for v in others),
    )
    aux = [min(cap, a) for a in padded_aux]

    indeg = [1] * n
    indeg[root] = 0
    for v in eh:
        indeg[v] += 1
    absorbed = {v for v in range(n) if v != root and indeg[v] >= d.delta}

    survivors = tuple(v for v in range(n) if v not in absorbed)
    index = {v: i for i, v in enumerate(survivors)}
    new_root = index[root]
    t2: list[int] = []
    h2: list[int] = []
    w2: list[int] = []
    for a, b, w in zip(et, eh, ew):
        if b in absorbed:
            b2 = new_root
        else:
            b2 = index[b]
        a2 = new_root if a in absorbed else index[a]
        if a2 == b2 or b2 == new_root:
            continue
        if a2 == new_root:
            aux[b] = min(cap, aux[b] + w)
            continue
        t2.append(a2)
        h2.append(b2)
        w2.append(w)
    aux_edge = [-1] * len(survivors)
    for v in survivors:
        if v == root:
            continue
        aux_edge[index[v]] = len(t2)
        t2.append(new_root)
        h2.append(index[v])
        w2.append(aux[v])
    if counters is not None:
        counters["sparsify.edges"] += g.m + n
    graph = WeightedDigraph(len(survivors), tuple(t2), tuple(h2), tuple(w2))
    return SparsifiedGraph(
        graph=graph,
        tau=d.tau,
        root=new_root,
        aux_edge=tuple(aux_edge),
        survivors=survivors,
        index=index,
        params=p,
        derived=d,
        contracted=frozenset(absorbed),
        padded=padded,
    )


@dataclass(frozen=True, eq=False)
class SparsifiedVertexGraph:
    """Integer vertex-weighted graph produced by vertex sparsification.

    Vertices ``0..original_n-1`` keep their ids; auxiliary vertices follow.
    ``aux_vertex[v]`` is the id of ``a_v``.  ``eligible_sinks`` is the set of
    original vertices that are neither the root nor fed by it.  ``padded``
    (fresh sparsification only) is the untruncated unit-weight graph right
    after the auxiliary vertices are added.
    """

    graph: VertexWeightedDigraph
    tau: Fraction
    root: int
    aux_vertex: dict[int, int]
    eligible_sinks: frozenset[int]
    original_n: int
    rewired: frozenset[int]
    params: SparsifyParams
    derived: Derived
    padded: VertexWeightedDigraph | None = None

    def rescale(self, units) -> Fraction:
        return self.tau * units

    def check_invariants(self, original: VertexWeightedDigraph) -> list[str]:
        g, d = self.graph, self.derived
        bad = []
        if self.root >= g.n:
            bad.append("root: root missing")
        V_prime = original.eligible_sinks(self.root)
        if self.eligible_sinks != V_prime - self.rewired:
            bad.append("sinks: eligible sinks differ from V' minus rewired vertices")
        if any(not isinstance(w, int) or not 0 <= w <= d.cap for w in g.vertex_weights):
            bad.append("weights: integer vertex weights in [0, cap]")
        if any(len(nb) > d.delta for nb in g.in_neighbors):
            bad.append("degree: in-degree at most delta")
        if any(g.vertex_weights[v] == 0 and g.out_neighbors[v] for v in range(g.n) if v != self.root):
            bad.append("zero: weight-0 vertices have no outgoing edges")
        for v, a in self.aux_vertex.items():
            if self.root not in g.in_neighbors[a] or g.vertex_weights[a] != min(d.aux_units, d.cap):
                bad.append(f"aux: a_{v} not attached to the root")
                break
            if v not in self.rewired and v not in g.out_neighbors[a]:
                bad.append(f"aux: a_{v} does not feed {v}")
                break
        return bad


def _vertex_units(g: VertexWeightedDigraph, d: Derived, seed: int) -> list[int]:
    mult, den = _unit_scale(g.denominator, d.tau)
    D = g.denominator
    gen = rngmod.generator(seed, rngmod.SPARSIFY_VERTEX)
    draws = gen.random(g.n).tolist()
    out = []
    for v, w in enumerate(g.vertex_weights):
        scaled = int(w * D)
        out.append(_round_units(scaled * mult, den, draws[v]))
    return out


def sparsify_vertex(
    g: VertexWeightedDigraph, root: int, p: SparsifyParams, counters: Counters | None = None
) -> SparsifiedVertexGraph:
    """Sparsify ``g`` for rooted vertex cuts with sink size about ``p.k_guess``.

    The root is exempt from losing its out-edges when its own weight rounds
    to zero; its weight never enters a vertex cut.
    """
    n = g.n
    if not 0 <= root < n:
        raise GraphError(f"root {root} out of range")
    d = p.derive(n)
    raw = _vertex_units(g, d, p.rng_seed)
    units = [min(d.cap, u) for u in raw]
    aux_w = min(d.aux_units, d.cap)

    tails: list[int] = []
    heads: list[int] = []
    for a, b in zip(g.tails, g.heads):
        if units[a] > 0 or a == root:
            tails.append(a)
            heads.append(b)
    aux_vertex: dict[int, int] = {}
    weights = list(units)
    for v in range(n):
        if v == root:
            continue
        a = n + len(aux_vertex)
        aux_vertex[v] = a
        weights.append(aux_w)
        tails += (root, a)
        heads += (a, v)

    indeg = [0] * len(weights)
    for b in heads:
        indeg[b] += 1
    hot = frozenset(v for v in range(n) if indeg[v] >= d.delta)
    if hot:
        kept = [(a, b) for a, b in zip(tails, heads) if b not in hot]
        kept += [(root, v) for v in sorted(hot) if v != root]
        tails = [a for a, _ in kept]
        heads = [b for _, b in kept]
    if counters is not None:
        counters["sparsify.edges"] += g.m + 3 * n
    graph = VertexWeightedDigraph(len(weights), tuple(tails), tuple(heads), tuple(weights))
    others = [v for v in range(n) if v != root]
    padded = VertexWeightedDigraph(
        len(weights),
        g.tails + tuple(x for v in others for x in (root, aux_vertex[v])),
        g.heads + tuple(x for v in others for x in (aux_vertex[v], v)),
        tuple(raw) + (d.aux_units,) * len(others),
    )
    sinks = frozenset(v for v in g.eligible_sinks(root) if v not in hot)
    return SparsifiedVertexGraph(
        graph=graph,
        tau=d.tau,
        root=root,
        aux_vertex=aux_vertex,
        eligible_sinks=sinks,
        original_n=n,
        rewired=frozenset(v for v in hot if v != root),
        params=p,
        derived=d,
        padded=padded,
    )


class DeferredVertexCore:
    """Root-independent part of vertex sparsification, shared by many roots.

    Rounding, zero-stripping, truncation and the high in-degree test are done
    once; :meth:`attach_root` then adds the root's auxiliary vertices and the
    root-fed edges in time linear in ``n``.  In-degrees for the threshold are
    measured before any auxiliary edge exists.
    """

    def __init__(self, g: VertexWeightedDigraph, p: SparsifyParams, counters: Counters | None = None):
        self.source = g
        self.params = p
        self.derived = d = p.derive(g.n)
        self.units = [min(d.cap, u) for u in _vertex_units(g, d, p.rng_seed)]
        units = self.units
        self.zero = frozenset(v for v in range(g.n) if units[v] == 0)
        indeg = [0] * g.n
        kept = [(a, b) for a, b in zip(g.tails, g.heads) if units[a] > 0]
        for _, b in kept:
            indeg[b] += 1
        self.hot = frozenset(v for v in range(g.n) if indeg[v] >= d.delta)
        kept = [(a, b) for a, b in kept if b not in self.hot]
        self.tails = tuple(a for a, _ in kept)
        self.heads = tuple(b for _, b in kept)
        if counters is not None:
            counters["sparsify.edges"] += g.m + g.n

    def attach_root(self, root: int, counters: Counters | None = None) -> SparsifiedVertexGraph:
        g, d = self.source, self.derived
        n = g.n
        if not 0 <= root < n:
            raise GraphError(f"root {root} out of range")
        extra_t: list[int] = []
        extra_h: list[int] = []
        if root in self.zero:
            for b in g.out_neighbors[root]:
                if b not in self.hot:
                    extra_t.append(root)
                    extra_h.append(b)
        for v in sorted(self.hot):
            if v != root:
                extra_t.append(root)
                extra_h.append(v)
        aux_w = min(d.aux_units, d.cap)
        aux_vertex: dict[int, int] = {}
        weights = list(self.units)
        for v in range(n):
            if v == root:
                continue
            a = n + len(aux_vertex)
            aux_vertex[v] = a
            weights.append(aux_w)
            extra_t.append(root)
            extra_h.append(a)
            if v not in self.hot:
                extra_t.append(a)
                extra_h.append(v)
        if counters is not None:
            counters["sparsify.attach"] += len(extra_t) + n
        graph = VertexWeightedDigraph(
            len(weights), self.tails + tuple(extra_t), self.heads + tuple(extra_h), tuple(weights)
        )
        fed = set(graph.out_neighbors[root])
        sinks = frozenset(v for v in range(n) if v != root and v not in fed)
        return SparsifiedVertexGraph(
            graph=graph,
            tau=d.tau,
            root=root,
            aux_vertex=aux_vertex,
            eligible_sinks=sinks,
            original_n=n,
            rewired=frozenset(v for v in self.hot if v != root),
            params=self.params,
            derived=d,
        )


def sparsify_vertex_deferred(
    g: VertexWeightedDigraph, p: SparsifyParams, counters: Counters | None = None
) -> DeferredVertexCore:
    """Run the root-independent steps once; call ``.attach_root(r)`` per root."""
    return DeferredVertexCore(g, p, counters)
