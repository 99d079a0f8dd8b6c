from __future__ import annotations

import numpy as np
from hypothesis import HealthCheck, settings, strategies as st

from dircut.graph import build_graph, build_vertex_graph

# the first flow call pays for numba compilation
settings.register_profile("dircut", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("dircut")


def random_edge_graph(seed: int, n: int, p: float = 0.35, wmax: int = 20):
    gen = np.random.default_rng(seed)
    edges = [
        (u, v, int(gen.integers(1, wmax + 1)))
        for u in range(n)
        for v in range(n)
        if u != v and gen.random() < p
    ]
    return build_graph(n, edges)


def random_vertex_graph(seed: int, n: int, p: float = 0.35, wmax: int = 9):
    gen = np.random.default_rng(seed)
    weights = gen.integers(1, wmax + 1, n).tolist()
    edges = [(u, v) for u in range(n) for v in range(n) if u != v and gen.random() < p]
    return build_vertex_graph(n, weights, edges)


@st.composite
def edge_graphs(draw, min_n: int = 2, max_n: int = 8, wmax: int = 20):
    n = draw(st.integers(min_n, max_n))
    pairs = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1), st.integers(1, wmax))
    edges = draw(st.lists(pairs, max_size=3 * n))
    return build_graph(n, edges)


@st.composite
def vertex_graphs(draw, min_n: int = 2, max_n: int = 7, wmax: int = 9):
    n = draw(st.integers(min_n, max_n))
    weights = draw(st.lists(st.integers(1, wmax), min_size=n, max_size=n))
    pairs = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
    edges = draw(st.lists(pairs, max_size=3 * n))
    return build_vertex_graph(n, weights, edges)


def _subset_masks(items):
    """Every nonempty subset of ``items`` as an int64 bitmask over vertex ids."""
    idx = np.arange(1, 1 << len(items), dtype=np.int64)
    out = np.zeros_like(idx)
    for j, v in enumerate(items):
        out |= ((idx >> j) & 1) << v
    return out


def _popcount(masks):
    return np.array([int(x).bit_count() for x in masks.tolist()], dtype=np.int64)


def _within(lower, value, upper, tol=1e-9):
    scale = np.maximum(1.0, np.abs(upper))
    return bool(np.all(lower <= value + tol * scale) and np.all(value <= upper + tol * scale))


def padded_edge_bounds_hold(g, root, sg) -> bool:
    """``(1-eps) f(S) <= tau h(S) <= (1+eps) f(S) + eps lambda |S| / k`` for every ``S``.

    ``f`` is the in-cut in ``g``; ``h`` the in-cut in the padded graph, in units.
    """
    p = sg.params
    eps, lam, k = float(p.eps), float(p.lambda_guess), p.k_guess
    masks = _subset_masks([v for v in range(g.n) if v != root])
    f = np.zeros(len(masks))
    h = np.zeros(len(masks))
    for graph, acc, scale in ((g, f, 1.0 / g.denominator), (sg.padded, h, float(sg.tau))):
        for u, v, w in zip(graph.tails, graph.heads, graph.scaled_weights):
            hit = ((masks >> v) & 1) & (1 - ((masks >> u) & 1))
            acc += hit * (w * scale)
    size = _popcount(masks)
    return _within((1 - eps) * f, h, (1 + eps) * f + eps * lam * size / k)


def padded_vertex_bounds_hold(g, root, sv) -> bool:
    """Same bounds for vertex in-cuts over every nonempty ``S`` inside ``V'``."""
    p = sv.params
    eps, lam, k = float(p.eps), float(p.lambda_guess), p.k_guess
    sinks = sorted(g.eligible_sinks(root))
    if not sinks:
        return True
    masks = _subset_masks(sinks)
    f = np.zeros(len(masks))
    h = np.zeros(len(masks))
    tau = float(sv.tau)
    raw = sv.padded.vertex_weights
    for u in range(g.n):
        out = 0
        for v in g.out_neighbors[u]:
            out |= 1 << v
        if not out:
            continue
        touches = ((masks & out) != 0) & (((masks >> u) & 1) == 0)
        f += touches * float(g.vertex_weights[u])
        h += touches * (raw[u] * tau)
    size = _popcount(masks)
    h += size * (sv.derived.aux_units * tau)
    return _within((1 - eps) * f, h, (1 + eps) * f + eps * lam * size / k)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
