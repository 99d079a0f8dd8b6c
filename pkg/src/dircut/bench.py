"""Synthetic graph families and the scaling harness."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import rng as rngmod
from .graph import WeightedDigraph, build_graph
from .instrument import Counters
from .rooted import DriverConfig, approx_rooted_ec

FAMILIES = ("random", "planted", "layered")


def _ring(n: int, gen, lo: int, hi: int):
    """A Hamiltonian cycle through a random permutation, so everything is strongly connected."""
    order = gen.permutation(n).tolist()
    return [(order[i], order[(i + 1) % n], int(gen.integers(lo, hi + 1))) for i in range(n)]


def random_graph(n: int, seed: int, degree: int = 8) -> WeightedDigraph:
    """Erdős–Rényi style digraph with about ``degree`` out-edges per vertex and rational weights."""
    gen = rngmod.generator(seed, rngmod.BENCH, 1, n)
    m = degree * n
    tails = gen.integers(0, n, m).tolist()
    heads = gen.integers(0, n, m).tolist()
    nums = gen.integers(1, 41, m).tolist()
    dens = gen.integers(1, 5, m).tolist()
    edges = [(u, v, Fraction(a, b)) for u, v, a, b in zip(tails, heads, nums, dens)]
    edges += _ring(n, gen, 5, 20)
    return build_graph(n, edges)


def planted_graph(n: int, seed: int, degree: int = 8, sink_size: int | None = None) -> WeightedDigraph:
    """Heavy random digraph with a planted sink ``S`` entered by only two light edges.

    ``S`` is the vertex block ``n - |S| .. n-1`` (default ``|S| = n/8``); the
    minimum cut from root 0 is the planted one.
    """
    gen = rngmod.generator(seed, rngmod.BENCH, 2, n)
    s = sink_size if sink_size is not None else max(1, n // 8)
    inside = set(range(n - s, n))
    edges = []
    m = degree * n
    tails = gen.integers(0, n, m).tolist()
    heads = gen.integers(0, n, m).tolist()
    ws = gen.integers(10, 21, m).tolist()
    for u, v, w in zip(tails, heads, ws):
        if v in inside and u not in inside:
            continue
        edges.append((u, v, w))
    outside = [v for v in range(n) if v not in inside]
    ins = sorted(inside)
    for _ in range(2):
        edges.append((int(gen.choice(outside)), int(gen.choice(ins)), 1))
    # cycles inside both parts, plus an exit from S, keep everything reachable
    for part in (outside, ins):
        for i in range(len(part)):
            if len(part) > 1:
                edges.append((part[i], part[(i + 1) % len(part)], int(gen.integers(10, 21))))
    edges.append((ins[0], outside[0], 10))
    return build_graph(n, edges)


def layered_graph(n: int, seed: int, width: int = 8) -> WeightedDigraph:
    """Layers of ``width`` vertices with forward edges between consecutive layers and random back-edges."""
    gen = rngmod.generator(seed, rngmod.BENCH, 3, n)
    layers = [list(range(i, min(n, i + width))) for i in range(0, n, width)]
    edges = []
    for a, b in zip(layers, layers[1:]):
        for u in a:
            for v in gen.choice(b, size=min(3, len(b)), replace=False).tolist():
                edges.append((u, v, int(gen.integers(1, 21))))
    back = max(1, n // 4)
    for _ in range(back):
        u, v = sorted(gen.integers(0, n, 2).tolist(), reverse=True)
        edges.append((u, v, int(gen.integers(1, 21))))
    # close the layering into a cycle so every vertex is reachable from 0
    edges.append((layers[-1][0], 0, 20))
    for layer in layers:
        for i in range(len(layer) - 1):
            edges.append((layer[i], layer[i + 1], int(gen.integers(1, 21))))
    return build_graph(n, edges)


def make_graph(family: str, n: int, seed: int) -> WeightedDigraph:
    if family == "random":
        return random_graph(n, seed)
    if family == "planted":
        return planted_graph(n, seed)
    if family == "layered":
        return layered_graph(n, seed)
    raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")


@dataclass(frozen=True)
class BenchRow:
    n: int
    m: int
    trial: int
    traversals: int
    flow_calls: int
    local_queries: int
    weight: object
    seconds: float


@dataclass(frozen=True)
class BenchSummary:
    rows: list[BenchRow]
    exponent: float

    def table(self) -> str:
        lines = ["n m trial traversals flow_calls local_queries weight"]
        for r in self.rows:
            lines.append(
                f"{r.n} {r.m} {r.trial} {r.traversals} {r.flow_calls} {r.local_queries} {r.weight}"
            )
        lines.append(f"exponent {self.exponent:.3f}")
        return "\n".join(lines)


def fit_exponent(sizes, values) -> float:
    """Least-squares slope of ``log(value)`` against ``log(n)``."""
    x = np.log(np.asarray(sizes, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    if len(set(sizes)) < 2:
        return float("nan")
    return float(np.polyfit(x, y, 1)[0])


def run_bench(family: str, sizes, eps, trials: int = 1, seed: int = 0, config: DriverConfig | None = None) -> BenchSummary:
    """Run the rooted edge pipeline (root 0) on ``trials`` graphs per size and fit the traversal exponent."""
    base = config or DriverConfig()
    rows = []
    for n in sizes:
        for trial in range(trials):
            g = make_graph(family, n, rngmod.derive_seed(seed, rngmod.BENCH, n, trial))
            counters = Counters()
            cfg = base.with_(eps=eps, seed=rngmod.derive_seed(seed, rngmod.BENCH, n, trial, 1))
            t0 = time.perf_counter()
            report = approx_rooted_ec(g, 0, cfg, counters)
            rows.append(
                BenchRow(
                    n=n,
                    m=g.m,
                    trial=trial,
                    traversals=counters.traversals(),
                    flow_calls=counters["flow.calls"],
                    local_queries=counters["local.queries"],
                    weight=report.best.weight,
                    seconds=time.perf_counter() - t0,
                )
            )
    exponent = fit_exponent([r.n for r in rows], [max(1, r.traversals) for r in rows])
    return BenchSummary(rows, exponent)


def n2_polylog(n: int) -> float:
    return n * n * math.log(n) ** 2
