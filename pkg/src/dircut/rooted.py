"""Approximate minimum rooted and global cuts.

The drivers guess the connectivity ``lambda`` (factor-2 grid) and the sink
size ``k`` (powers of two).  Small sinks are found by sampling a vertex of
the sink and asking a local structure; big sinks by sampling a vertex of
the sink and running an exact max-flow in the sparsified graph.  Every
candidate is re-evaluated in the input graph, so a returned cut is always
valid and its weight exact; randomness only affects how close to optimal
it is.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import rng as rngmod
from .graph import (
    CutResult,
    GraphError,
    NoCut,
    VertexWeightedDigraph,
    WeightedDigraph,
    as_weight,
    edge_cut,
    reachable,
    reverse,
    vertex_cut,
    vertex_in_cut,
)
from .instrument import Counters
from .local import DEFAULT_C_LOCAL, build_local_ec, build_local_vc
from .maxflow import FlowNetwork, VertexFlowNetwork
from .oracle import map_reversed_cut
from .sparsify import DeferredVertexCore, SparsifyParams, sparsify_edge

SMALL = "small"
BIG = "big"


@dataclass(frozen=True)
class DriverConfig:
    """Knobs shared by all drivers.

    ``k_star`` overrides the small/big balance point.  ``lambda_grid`` and
    ``k_grid`` replace the automatic guess grids.  ``prune`` stops the
    connectivity grid once it passes twice the best cut found so far.
    """

    eps: Fraction = Fraction(1, 5)
    seed: int = 0
    fail_prob: Optional[Fraction] = None
    sample_c: Fraction = Fraction(3)
    k_star: Optional[float] = None
    lambda_grid: Optional[tuple] = None
    k_grid: Optional[tuple[int, ...]] = None
    prune: bool = True
    c_tau: Fraction = Fraction(1, 64)
    c_delta: Fraction = Fraction(256)
    c_w: Fraction = Fraction(128)
    c_clamp: Fraction = Fraction(2)
    c_local: Fraction = DEFAULT_C_LOCAL
    c_big: Fraction = Fraction(1, 2)
    strict: bool = False

    def __post_init__(self):
        for name in ("eps", "sample_c", "c_tau", "c_delta", "c_w", "c_clamp", "c_local", "c_big"):
            object.__setattr__(self, name, Fraction(as_weight(getattr(self, name))))
        if not 0 < self.eps < 1:
            raise ValueError(f"eps must lie in (0, 1), got {self.eps}")
        if self.fail_prob is not None:
            fp = Fraction(as_weight(self.fail_prob))
            if not 0 < fp < 1:
                raise ValueError("fail_prob must lie in (0, 1)")
            object.__setattr__(self, "fail_prob", fp)
        if self.sample_c <= 0:
            raise ValueError("sample_c must be positive")
        if self.lambda_grid is not None:
            object.__setattr__(self, "lambda_grid", tuple(sorted(Fraction(as_weight(x)) for x in self.lambda_grid)))
        if self.k_grid is not None:
            object.__setattr__(self, "k_grid", tuple(sorted(int(k) for k in self.k_grid)))

    def sample_constant(self, n: int) -> float:
        c = float(self.sample_c)
        if self.fail_prob is not None and n > 1:
            c = max(c, math.log(1 / float(self.fail_prob)) / math.log(n))
        return c

    def params(self, guess, k: int, eps: Fraction, seed: int) -> SparsifyParams:
        return SparsifyParams(
            eps=eps,
            lambda_guess=guess,
            k_guess=k,
            c_tau=self.c_tau,
            c_delta=self.c_delta,
            c_w=self.c_w,
            c_clamp=self.c_clamp,
            rng_seed=seed,
        )

    def with_(self, **changes) -> DriverConfig:
        data = {f: getattr(self, f) for f in self.__dataclass_fields__}
        data.update(changes)
        return DriverConfig(**data)


@dataclass(frozen=True)
class GuessRecord:
    guess: Fraction
    k: int
    branch: str
    best_weight: object  # exact weight, or None when nothing was found


@dataclass
class ApproxCutReport:
    """Best cut found plus a trace of the guesses that produced it."""

    best: CutResult
    candidates_examined: int
    guesses: list[GuessRecord]
    seed: int
    counters: Counters = field(default_factory=Counters)


# -- helpers -------------------------------------------------------------------


def _log(n: int) -> float:
    return max(1.0, math.log(n)) if n > 1 else 1.0


def _sample_count(c: float, population: int, n: int, k: int) -> int:
    return math.ceil(c * population * _log(n) / k)


def _key(q) -> tuple[int, int]:
    return rngmod.fraction_key(q)


def _better(a: Optional[CutResult], b: Optional[CutResult]) -> Optional[CutResult]:
    if a is None:
        return b
    if b is None:
        return a
    return a if a.sort_key() <= b.sort_key() else b


def powers_of_two_until(limit: int) -> list[int]:
    """``1, 2, 4, ...`` up to and including the first power that is ``>= limit``."""
    out = [1]
    while out[-1] < limit:
        out.append(out[-1] * 2)
    return out


def guess_grid(lo, cap, explicit=None) -> list[Fraction]:
    """Factor-2 grid ``lo * 2^i`` for every value below ``cap`` (at least one entry)."""
    if explicit is not None:
        return sorted(Fraction(x) for x in explicit)
    lo = Fraction(lo)
    out = [lo]
    while out[-1] * 2 < cap:
        out.append(out[-1] * 2)
    return out


def _unreachable_cut(g, root: int, kind: str) -> Optional[CutResult]:
    adj = g.out_neighbors if kind == "vertex" else [[g.heads[e] for e in out] for out in g.out_edges]
    seen = reachable(g.n, adj, root)
    if len(seen) == g.n:
        return None
    sink = frozenset(range(g.n)) - seen
    return edge_cut(g, root, sink) if kind == "edge" else vertex_cut(g, root, sink)


def _k_star(config: DriverConfig, n: int, kind: str) -> float:
    if config.k_star is not None:
        return float(config.k_star)
    e = float(config.eps)
    if kind == "edge":
        return math.sqrt(n) * e ** (4 / 3)
    return e * math.sqrt(n)


# -- edge variant --------------------------------------------------------------


class _EdgeRun:
    """State for one ``approx_rooted_ec`` call: caches and counters."""

    def __init__(self, g: WeightedDigraph, root: int, config: DriverConfig, counters: Counters, tag: int):
        self.g, self.root, self.config, self.counters = g, root, config, counters
        self.tag = tag
        self.examined = 0
        self.local_cache: dict = {}
        self.c = config.sample_constant(g.n)

    def seed(self, *key) -> int:
        return rngmod.derive_seed(self.config.seed, self.tag, *key)

    def small_sink(self, guess: Fraction, k: int) -> Optional[CutResult]:
        best = None
        for ell in powers_of_two_until(2 * k):
            if ell > 2 * k:
                break
            best = _better(best, self._small_ell(guess, ell))
        return best

    def _small_ell(self, guess: Fraction, ell: int) -> Optional[CutResult]:
        key = (guess, ell)
        if key in self.local_cache:
            return self.local_cache[key]
        g, root, cfg = self.g, self.root, self.config
        p = cfg.params(guess, ell, cfg.eps, self.seed(rngmod.GUESS, *_key(guess), ell, 0))
        s = build_local_ec(g, root, p, c_local=cfg.c_local, strict=cfg.strict, counters=self.counters)
        population = [v for v in range(g.n) if v != root]
        gen = rngmod.generator(self.seed(rngmod.SAMPLE_SINKS, *_key(guess), ell, 0))
        picks = rngmod.sample_indices(gen, len(population), _sample_count(self.c, len(population), g.n, ell))
        best = None
        for i in picks:
            ans = s.query(population[i])
            self.examined += 1
            if ans.above:
                continue
            best = _better(best, CutResult(ans.sink_component, frozenset(), ans.weight, root, "edge"))
        if best is not None:
            best = edge_cut(g, root, best.sink_component)
        self.local_cache[key] = best
        return best

    def big_sink(self, guess: Fraction, k: int) -> Optional[CutResult]:
        g, root, cfg = self.g, self.root, self.config
        p = cfg.params(guess, k, cfg.eps * cfg.c_big, self.seed(rngmod.GUESS, *_key(guess), k, 1))
        sg = sparsify_edge(g, root, p, self.counters)
        if sg.degenerate:
            return None
        h = sg.graph
        population = [v for v in range(h.n) if v != sg.root]
        count = _sample_count(self.c, len(population), g.n, k)
        if k > g.n:
            count = len(population)
        gen = rngmod.generator(self.seed(rngmod.SAMPLE_SINKS, *_key(guess), k, 1))
        picks = sorted(population[i] for i in rngmod.sample_indices(gen, len(population), count))
        net = FlowNetwork(h, self.counters)
        # cuts above c_clamp * lambda are never needed for this guess
        cutoff = math.floor(cfg.c_clamp * sg.derived.lambda_units) + 1
        best_t = -1
        for t in picks:
            value, _, truncated = net.solve_raw(sg.root, t, cutoff)
            self.examined += 1
            if not truncated and value < cutoff:
                cutoff, best_t = value, t
        if best_t < 0:
            return None
        res = net.solve(sg.root, best_t)
        sink = sg.to_original(set(range(h.n)) - res.source_side)
        self.counters["eval.edges"] += g.m
        return edge_cut(g, root, sink)


def rooted_ec_small_sink(
    g: WeightedDigraph, root: int, lambda_guess, k_guess: int, eps, seed: int = 0, **kw
) -> Optional[CutResult]:
    """Small-sink branch for one ``(lambda, k)`` guess; ``None`` means nothing found."""
    cfg = DriverConfig(eps=eps, seed=seed, **kw)
    run = _EdgeRun(g, root, cfg, Counters(), 0)
    return run.small_sink(Fraction(as_weight(lambda_guess)), int(k_guess))


def rooted_ec_big_sink(
    g: WeightedDigraph, root: int, lambda_guess, k_guess: int, eps, seed: int = 0, **kw
) -> Optional[CutResult]:
    """Big-sink branch for one ``(lambda, k)`` guess; ``None`` means nothing found."""
    cfg = DriverConfig(eps=eps, seed=seed, **kw)
    run = _EdgeRun(g, root, cfg, Counters(), 0)
    return run.big_sink(Fraction(as_weight(lambda_guess)), int(k_guess))


def _singleton_upper_bound_ec(g: WeightedDigraph, root: int) -> CutResult:
    best_v = min((v for v in range(g.n) if v != root), key=lambda v: (g.weighted_in_degree(v), v))
    return edge_cut(g, root, {best_v})


def approx_rooted_ec(
    g: WeightedDigraph, root: int, config: DriverConfig | None = None, counters: Counters | None = None, _tag: int = 0
) -> ApproxCutReport:
    """``(1 + eps)``-approximate minimum edge ``root``-cut (with high probability)."""
    config = config or DriverConfig()
    counters = counters if counters is not None else Counters()
    if g.n < 2:
        raise GraphError("need at least two vertices")
    if not 0 <= root < g.n:
        raise GraphError(f"root {root} out of range")
    zero = _unreachable_cut(g, root, "edge")
    if zero is not None:
        return ApproxCutReport(zero, 0, [], config.seed, counters)
    run = _EdgeRun(g, root, config, counters, _tag)
    upper = _singleton_upper_bound_ec(g, root)
    counters["eval.edges"] += g.m
    best = upper
    guesses: list[GuessRecord] = []
    k_star = _k_star(config, g.n, "edge")
    k_grid = list(config.k_grid) if config.k_grid is not None else powers_of_two_until(g.n - 1)
    lo = min(g.weights)
    for guess in guess_grid(lo, 2 * upper.weight, config.lambda_grid):
        if config.prune and config.lambda_grid is None and guess >= 2 * best.weight:
            break
        for k in k_grid:
            branch = SMALL if k <= k_star else BIG
            found = run.small_sink(guess, k) if branch == SMALL else run.big_sink(guess, k)
            guesses.append(GuessRecord(guess, k, branch, None if found is None else found.weight))
            best = _better(best, found)
    return ApproxCutReport(best, run.examined, guesses, config.seed, counters)


def approx_global_ec(
    g: WeightedDigraph, config: DriverConfig | None = None, counters: Counters | None = None
) -> ApproxCutReport:
    """Global minimum edge cut: root 0 in ``g`` and in ``reverse(g)``."""
    config = config or DriverConfig()
    counters = counters if counters is not None else Counters()
    if g.n < 2:
        raise GraphError("need at least two vertices")
    fwd = approx_rooted_ec(g, 0, config, counters, _tag=1)
    bwd = approx_rooted_ec(reverse(g), 0, config, counters, _tag=2)
    best = _better(fwd.best, map_reversed_cut(g, bwd.best))
    return ApproxCutReport(
        best, fwd.candidates_examined + bwd.candidates_examined, fwd.guesses + bwd.guesses, config.seed, counters
    )


# -- vertex variant ------------------------------------------------------------


class _VertexRun:
    """State for rooted vertex-cut runs; the sparsification cores may be shared across roots."""

    def __init__(
        self,
        g: VertexWeightedDigraph,
        config: DriverConfig,
        counters: Counters,
        tag: int,
        cores: dict | None = None,
    ):
        self.g, self.config, self.counters, self.tag = g, config, counters, tag
        self.examined = 0
        self.cores = cores if cores is not None else {}
        self.c = config.sample_constant(g.n)

    def seed(self, *key) -> int:
        return rngmod.derive_seed(self.config.seed, self.tag, *key)

    def core(self, guess: Fraction, k: int, branch: int, eps: Fraction) -> DeferredVertexCore:
        key = (guess, k, branch)
        core = self.cores.get(key)
        if core is None:
            p = self.config.params(guess, k, eps, self.seed(rngmod.GUESS, *_key(guess), k, branch))
            core = DeferredVertexCore(self.g, p, self.counters)
            self.cores[key] = core
        return core

    def _eligible(self, root: int) -> list[int]:
        return sorted(self.g.eligible_sinks(root))

    def small_sink(self, root: int, guess: Fraction, k: int, cache: dict) -> Optional[CutResult]:
        best = None
        for ell in powers_of_two_until(2 * k):
            if ell > 2 * k:
                break
            key = (guess, ell)
            if key not in cache:
                cache[key] = self._small_ell(root, guess, ell)
            best = _better(best, cache[key])
        return best

    def _small_ell(self, root: int, guess: Fraction, ell: int) -> Optional[CutResult]:
        g, cfg = self.g, self.config
        core = self.core(guess, ell, 0, cfg.eps * cfg.c_local)
        sparse = core.attach_root(root, self.counters)
        p = cfg.params(guess, ell, cfg.eps, core.params.rng_seed)
        s = build_local_vc(
            g, root, p, c_local=cfg.c_local, strict=cfg.strict, counters=self.counters, sparse=sparse
        )
        population = self._eligible(root)
        gen = rngmod.generator(self.seed(rngmod.SAMPLE_SINKS, root, *_key(guess), ell, 0))
        picks = rngmod.sample_indices(gen, len(population), _sample_count(self.c, len(population), g.n, ell))
        best = None
        for i in picks:
            ans = s.query(population[i])
            self.examined += 1
            if ans.above:
                continue
            best = _better(best, CutResult(ans.sink_component, ans.separator, ans.weight, root, "vertex"))
        return best

    def big_sink(self, root: int, guess: Fraction, k: int) -> Optional[CutResult]:
        g, cfg = self.g, self.config
        core = self.core(guess, k, 1, cfg.eps * cfg.c_big)
        sv = core.attach_root(root, self.counters)
        population = sorted(sv.eligible_sinks)
        if not population:
            return None
        count = _sample_count(self.c, len(population), g.n, k)
        if k > len(population):
            count = len(population)
        gen = rngmod.generator(self.seed(rngmod.SAMPLE_SINKS, root, *_key(guess), k, 1))
        picks = sorted(population[i] for i in rngmod.sample_indices(gen, len(population), count))
        net = VertexFlowNetwork(sv.graph, root, self.counters)
        cutoff = math.floor(cfg.c_clamp * sv.derived.lambda_units) + 1
        best_t = -1
        for t in picks:
            value, truncated = net.value(t, cutoff)
            self.examined += 1
            if not truncated and value < cutoff:
                cutoff, best_t = value, t
        if best_t < 0:
            return None
        res = net.solve(best_t)
        hidden = set(range(sv.graph.n)) - res.source_side - res.separator
        sink = frozenset(v for v in hidden if v < g.n)
        self.counters["eval.edges"] += g.m
        sep, weight = vertex_in_cut(g, root, sink)
        if not sink or weight == math.inf:
            raise AssertionError("big-sink candidate is not a valid vertex cut")
        return CutResult(sink, sep, weight, root, "vertex")

    def rooted(self, root: int, best_known: Optional[CutResult] = None):
        """Run the guess loops for one root; returns ``(best, guesses)``."""
        g, cfg = self.g, self.config
        population = self._eligible(root)
        if not population:
            raise NoCut(f"root {root} has an edge to every other vertex")
        zero = _unreachable_cut(g, root, "vertex")
        if zero is not None:
            return zero, []
        w = g.vertex_weights
        singles = [(sum((w[u] for u in set(g.in_neighbors[v])), 0), v) for v in population]
        _, v = min(singles)
        best = vertex_cut(g, root, {v})
        self.counters["eval.edges"] += g.m
        ceiling = best.weight if best_known is None else min(best.weight, best_known.weight)
        guesses: list[GuessRecord] = []
        k_star = _k_star(cfg, g.n, "vertex")
        k_grid = list(cfg.k_grid) if cfg.k_grid is not None else powers_of_two_until(g.n - 1)
        lo = min(w)
        cache: dict = {}
        for guess in guess_grid(lo, 2 * ceiling, cfg.lambda_grid):
            bound = best.weight if best_known is None else min(best.weight, best_known.weight)
            if cfg.prune and cfg.lambda_grid is None and guess >= 2 * bound:
                break
            for k in k_grid:
                branch = SMALL if k <= k_star else BIG
                if branch == SMALL:
                    found = self.small_sink(root, guess, k, cache)
                else:
                    found = self.big_sink(root, guess, k)
                guesses.append(GuessRecord(guess, k, branch, None if found is None else found.weight))
                best = _better(best, found)
        return best, guesses


def rooted_vc_small_sink(
    g: VertexWeightedDigraph, root: int, kappa_guess, k_guess: int, eps, seed: int = 0, **kw
) -> Optional[CutResult]:
    cfg = DriverConfig(eps=eps, seed=seed, **kw)
    if not g.eligible_sinks(root):
        return None
    run = _VertexRun(g, cfg, Counters(), 0)
    return run.small_sink(root, Fraction(as_weight(kappa_guess)), int(k_guess), {})


def rooted_vc_big_sink(
    g: VertexWeightedDigraph, root: int, kappa_guess, k_guess: int, eps, seed: int = 0, **kw
) -> Optional[CutResult]:
    cfg = DriverConfig(eps=eps, seed=seed, **kw)
    if not g.eligible_sinks(root):
        return None
    run = _VertexRun(g, cfg, Counters(), 0)
    return run.big_sink(root, Fraction(as_weight(kappa_guess)), int(k_guess))


def approx_rooted_vc(
    g: VertexWeightedDigraph, root: int, config: DriverConfig | None = None, counters: Counters | None = None
) -> ApproxCutReport:
    """``(1 + eps)``-approximate minimum vertex ``root``-cut; raises :class:`NoCut` if none exists."""
    config = config or DriverConfig()
    counters = counters if counters is not None else Counters()
    if g.n < 2:
        raise GraphError("need at least two vertices")
    if not 0 <= root < g.n:
        raise GraphError(f"root {root} out of range")
    run = _VertexRun(g, config, counters, 0)
    best, guesses = run.rooted(root)
    return ApproxCutReport(best, run.examined, guesses, config.seed, counters)


def _roots_upper_bound(g: VertexWeightedDigraph):
    """Cheapest in- or out-neighbourhood that leaves some vertex on the far side."""
    w = g.vertex_weights
    best = None
    for nbrs in (g.in_neighbors, g.out_neighbors):
        for v in range(g.n):
            sep = set(nbrs[v])
            if len(sep) + 1 < g.n:
                val = sum((w[u] for u in sep), 0)
                best = val if best is None else min(best, val)
    return best


def root_probabilities(g: VertexWeightedDigraph) -> list[float]:
    """Roots are drawn in proportion to their weight."""
    weights = [float(x) for x in g.vertex_weights]
    total = sum(weights)
    return [x / total for x in weights]


def approx_global_vc(
    g: VertexWeightedDigraph, config: DriverConfig | None = None, counters: Counters | None = None
) -> ApproxCutReport:
    """Global minimum vertex cut by sampling roots in proportion to their weight.

    Each sampled root is solved in ``g`` and in ``reverse(g)``.  The number
    of roots adapts to the best cut seen so far.  Raises :class:`NoCut`
    when every vertex points at every other vertex.
    """
    config = config or DriverConfig()
    counters = counters if counters is not None else Counters()
    n = g.n
    if n < 2:
        raise GraphError("need at least two vertices")
    rg = reverse(g)
    for orient, h in ((0, g), (1, rg)):
        zero = _unreachable_cut(h, 0, "vertex")
        if zero is not None:
            best = zero if orient == 0 else map_reversed_cut(g, zero)
            return ApproxCutReport(best, 0, [], config.seed, counters)
    kappa_hat = _roots_upper_bound(g)
    if kappa_hat is None:
        raise NoCut("every vertex has an edge to every other vertex")
    runs = (_VertexRun(g, config, counters, 3), _VertexRun(rg, config, counters, 4))
    W = g.total_weight
    w_min = min(g.vertex_weights)
    c = config.sample_constant(n)
    probs = root_probabilities(g)
    gen = rngmod.generator(config.seed, rngmod.SAMPLE_ROOTS)
    best: Optional[CutResult] = None
    guesses: list[GuessRecord] = []
    done: set[int] = set()
    drawn = 0
    while True:
        est = kappa_hat if best is None else min(kappa_hat, best.weight)
        L = math.ceil(c * float(W) * _log(n) / float(max(W - est, w_min)))
        if drawn >= L or len(done) == n:
            break
        r = int(gen.choice(n, p=probs))
        drawn += 1
        if r in done:
            continue
        done.add(r)
        for orient, run in enumerate(runs):
            try:
                cut, trace = run.rooted(r, best)
            except NoCut:
                continue
            if orient == 1:
                cut = map_reversed_cut(g, cut)
            guesses += trace
            best = _better(best, cut)
    for r in range(n):
        # every sampled root was dominated; fall back to the first root that is not
        if best is not None:
            break
        if r in done:
            continue
        for orient, run in enumerate(runs):
            try:
                cut, trace = run.rooted(r, best)
            except NoCut:
                continue
            guesses += trace
            best = _better(best, cut if orient == 0 else map_reversed_cut(g, cut))
    if best is None:
        raise NoCut("no root admits a vertex cut")
    examined = sum(run.examined for run in runs)
    return ApproxCutReport(best, examined, guesses, config.seed, counters)
