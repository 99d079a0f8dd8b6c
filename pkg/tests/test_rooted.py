import math
from fractions import Fraction

import numpy as np
import pytest

from dircut import rng as rngmod
from dircut.bench import planted_graph
from dircut.graph import (
    NoCut,
    build_graph,
    build_vertex_graph,
    in_cut_weight,
    is_valid_edge_cut,
    is_valid_vertex_cut,
    reverse,
)
from dircut.instrument import Counters
from dircut.maxflow import max_flow
from dircut.oracle import exact_global_ec, exact_global_vc, exact_rooted_ec, exact_rooted_vc
from dircut.rooted import (
    DriverConfig,
    approx_global_ec,
    approx_global_vc,
    approx_rooted_ec,
    approx_rooted_vc,
    guess_grid,
    powers_of_two_until,
    root_probabilities,
    rooted_ec_big_sink,
    rooted_ec_small_sink,
    rooted_vc_big_sink,
    rooted_vc_small_sink,
)
from dircut.sparsify import SparsifyParams, sparsify_edge, sparsify_vertex

from conftest import random_edge_graph, random_vertex_graph

EPS = Fraction(1, 5)


def test_grids():
    assert powers_of_two_until(5) == [1, 2, 4, 8]
    assert guess_grid(Fraction(3), 20) == [3, 6, 12]
    assert guess_grid(1, 5, explicit=(4, 2)) == [2, 4]


def _light_singleton_graph():
    """Heavy 9-vertex digraph where t = 9 has a single entering edge of weight 1."""
    edges = [(u, v, 40) for u in range(9) for v in range(9) if u != v and (u + v) % 3]
    edges += [(4, 9, 1), (9, 2, 40)]
    return build_graph(10, edges)


def test_light_singleton_small_sink():
    g = _light_singleton_graph()
    assert exact_rooted_ec(g, 0).weight == 1
    hits = 0
    for seed in range(200):
        cut = rooted_ec_small_sink(g, 0, 8, 1, EPS, seed=seed)
        hits += cut is not None and cut.weight <= (1 + EPS) * 1
    assert hits >= 190


def test_nothing_below_threshold():
    g = build_graph(5, [(u, v, 100) for u in range(5) for v in range(5) if u != v])
    for seed in range(20):
        assert rooted_ec_small_sink(g, 0, 10, 2, EPS, seed=seed) is None
        assert rooted_ec_big_sink(g, 0, 10, 4, EPS, seed=seed) is None


def test_small_sink_cost_within_budget():
    """Arc scans never exceed queries * iterations * per-search budget."""
    for n in (16, 32):
        g = random_edge_graph(n, n, p=0.3)
        for k in (1, 2, 4):
            counters = Counters()
            cfg = DriverConfig(eps=EPS, k_star=10**9, k_grid=(k,), lambda_grid=(20,))
            approx_rooted_ec(g, 0, cfg, counters)
            L = max(1.0, math.log(n))
            e2 = float(EPS * cfg.c_local) ** 2
            per_query = (4 * float(cfg.c_w) * 2 * k * L / e2) * (16 * (2 * k) ** 2 * L / e2)
            assert counters["local.arc_scans"] <= counters["local.queries"] * per_query


def test_half_size_sink_found_by_big_branch():
    g = planted_graph(16, seed=3, sink_size=8)
    opt = exact_rooted_ec(g, 0).weight
    assert opt == 2
    hits = 0
    for seed in range(200):
        cut = rooted_ec_big_sink(g, 0, 2, 8, EPS, seed=seed)
        hits += cut is not None and cut.weight <= opt + EPS * 2
    assert hits >= 190


def test_oversized_k_samples_every_vertex():
    g = random_edge_graph(8, 12, p=0.35)
    lam, k = Fraction(16), 13
    cfg = DriverConfig(eps=EPS, seed=4, k_star=0, k_grid=(k,), lambda_grid=(lam,))
    report = approx_rooted_ec(g, 0, cfg)
    seed = rngmod.derive_seed(4, 0, rngmod.GUESS, *rngmod.fraction_key(lam), k, 1)
    sg = sparsify_edge(g, 0, cfg.params(lam, k, EPS * cfg.c_big, seed))
    assert report.candidates_examined == sg.graph.n - 1
    best = min(max_flow(sg.graph, sg.root, t).value for t in range(sg.graph.n) if t != sg.root)
    if best <= cfg.c_clamp * sg.derived.lambda_units:
        cut = rooted_ec_big_sink(g, 0, lam, k, EPS, seed=4, k_star=0)
        assert in_cut_weight(sg.graph, {sg.index[v] for v in cut.sink_component}) == best


def test_sparsified_size_bound():
    for seed in range(10):
        g = random_edge_graph(seed, 40, p=0.5)
        for k in (1, 4, 16):
            p = SparsifyParams(eps=EPS, lambda_guess=30, k_guess=k, rng_seed=seed)
            sg = sparsify_edge(g, 0, p)
            d = sg.derived
            assert sg.graph.m <= g.n * d.delta
            vg = random_vertex_graph(seed, 40, p=0.5)
            sv = sparsify_vertex(vg, 0, p)
            assert sv.graph.m <= sv.graph.n * d.delta


def test_two_vertex_exact():
    r = approx_rooted_ec(build_graph(2, [(0, 1, 5)]), 0, DriverConfig(seed=7))
    assert r.best.weight == 5


def test_unreachable_gives_zero():
    r = approx_rooted_ec(build_graph(3, [(0, 1, 5)]), 0)
    assert r.best.weight == 0 and r.best.sink_component == {2}


def test_rooted_ec_quality_and_validity():
    good = 0
    for seed in range(20):
        g = random_edge_graph(500 + seed, 20, p=0.3)
        opt = exact_rooted_ec(g, 0).weight
        r = approx_rooted_ec(g, 0, DriverConfig(eps=EPS, seed=seed, strict=True))
        assert is_valid_edge_cut(g, r.best) and r.best.weight >= opt
        good += r.best.weight <= (1 + EPS) * opt
    assert good >= 19


def test_cycle_with_light_edge():
    n = 12
    g = build_graph(n, [(i, (i + 1) % n, 3 if i == 5 else 50) for i in range(n)])
    r = approx_global_ec(g, DriverConfig(eps=EPS))
    assert r.best.weight <= (1 + EPS) * 3 and exact_global_ec(g).weight == 3


def test_complete_digraph_uniform():
    n, w = 8, 4
    g = build_graph(n, [(u, v, w) for u in range(n) for v in range(n) if u != v])
    r = approx_global_ec(g, DriverConfig(eps=EPS))
    assert (n - 1) * w <= r.best.weight <= (1 + EPS) * (n - 1) * w


def test_reversal_consistency():
    for seed in range(5):
        g = random_edge_graph(seed, 15, p=0.3)
        opt = exact_global_ec(g).weight
        assert exact_global_ec(reverse(g)).weight == opt
        for h in (g, reverse(g)):
            w = approx_global_ec(h, DriverConfig(eps=EPS, seed=seed)).best.weight
            assert opt <= w <= (1 + EPS) * opt


# -- vertex -----------------------------------------------------------------


def _wheel():
    """Root 0 feeds a rim 1..8; vertex 9 is guarded only by rim vertex 1 (weight 1)."""
    rim = list(range(1, 9))
    edges = [(0, v) for v in rim]
    edges += [(rim[i], rim[(i + 1) % len(rim)]) for i in range(len(rim))]
    edges += [(1, 9), (9, 3), (10, 0), (9, 10)]
    weights = [5, 1] + [9] * 7 + [9, 9]
    return build_vertex_graph(11, weights, edges)


def test_wheel_weak_vertex():
    g = _wheel()
    opt = exact_rooted_vc(g, 0)
    assert opt.weight == 1 and opt.cut_elements == {1}
    hits = 0
    for seed in range(200):
        r = approx_rooted_vc(g, 0, DriverConfig(eps=Fraction(1, 4), seed=seed))
        assert is_valid_vertex_cut(g, r.best)
        hits += r.best.weight <= Fraction(5, 4)
    assert hits >= 190


def test_dominating_root():
    g = build_vertex_graph(4, [1] * 4, [(0, v) for v in range(1, 4)] + [(1, 2)])
    with pytest.raises(NoCut):
        approx_rooted_vc(g, 0)
    with pytest.raises(NoCut):
        exact_rooted_vc(g, 0)
    assert rooted_vc_small_sink(g, 0, 1, 1, EPS) is None


def _light_separator_big_sink(n=16):
    """Source block A and sink block B (half the graph) joined only through vertex s of weight 1."""
    half = n // 2
    A = list(range(0, half - 1))
    s = half - 1
    B = list(range(half, n))
    edges = [(u, v) for part in (A, B) for u in part for v in part if u != v and (u * 7 + v) % 3 == 0]
    edges += [(A[i], A[(i + 1) % len(A)]) for i in range(len(A))]
    edges += [(B[i], B[(i + 1) % len(B)]) for i in range(len(B))]
    edges += [(A[1], s), (s, B[0]), (B[0], A[0])]
    weights = [8] * n
    weights[s] = 1
    return build_vertex_graph(n, weights, edges), s, set(B)


def test_large_sink_behind_light_separator():
    g, s, B = _light_separator_big_sink()
    opt = exact_rooted_vc(g, 0)
    assert opt.weight == 1
    hits = 0
    for seed in range(200):
        cut = rooted_vc_big_sink(g, 0, 1, 8, Fraction(1, 4), seed=seed)
        hits += cut is not None and cut.weight <= Fraction(5, 4)
    assert hits >= 190


def test_vertex_oversized_k_is_exhaustive():
    g, _, _ = _light_separator_big_sink()
    population = g.eligible_sinks(0)
    cfg = DriverConfig(eps=Fraction(1, 4), k_star=0, k_grid=(len(population) + 1,), lambda_grid=(1,))
    report = approx_rooted_vc(g, 0, cfg)
    assert report.candidates_examined >= len(population) - 1


def test_vertex_path():
    g = build_vertex_graph(3, [1, 3, 1], [(0, 1), (1, 2)])
    r = approx_rooted_vc(g, 0)
    assert r.best.cut_elements == {1} and r.best.weight == 3


def test_rooted_vc_quality_and_validity():
    good = runs = 0
    for seed in range(30):
        g = random_vertex_graph(700 + seed, 16, p=0.3)
        try:
            opt = exact_rooted_vc(g, 0).weight
        except NoCut:
            continue
        runs += 1
        r = approx_rooted_vc(g, 0, DriverConfig(eps=Fraction(1, 4), seed=seed, strict=True))
        assert is_valid_vertex_cut(g, r.best) and r.best.weight >= opt
        good += r.best.weight <= Fraction(5, 4) * opt
    assert runs >= 20 and good >= runs - 1


def _articulation_graph():
    """Two dense blocks that only talk through vertex 5 (weight 1)."""
    A, B = [0, 1, 2, 3, 4], [6, 7, 8, 9, 10]
    edges = [(u, v) for part in (A, B) for u in part for v in part if u != v]
    edges += [(a, 5) for a in A[:2]] + [(5, b) for b in B[:2]]
    edges += [(b, 5) for b in B[2:4]] + [(5, a) for a in A[2:4]]
    weights = [6] * 11
    weights[5] = 1
    return build_vertex_graph(11, weights, edges)


def test_articulation_vertex_global():
    g = _articulation_graph()
    opt = exact_global_vc(g)
    assert opt.weight == 1 and opt.cut_elements == {5}
    hits = 0
    for seed in range(100):
        r = approx_global_vc(g, DriverConfig(eps=Fraction(1, 4), seed=seed))
        assert is_valid_vertex_cut(g, r.best)
        hits += r.best.weight <= Fraction(5, 4)
    assert hits >= 95


def test_root_probabilities():
    g = build_vertex_graph(4, [2] * 4, [(0, 1)])
    assert root_probabilities(g) == [0.25] * 4
    g = build_vertex_graph(3, [1, 2, 5], [(0, 1)])
    assert np.allclose(root_probabilities(g), [1 / 8, 2 / 8, 5 / 8])


def test_per_root_queries_track_population():
    """Small-sink queries for a root never exceed |V'(r)| per (guess, ell) structure."""
    g = random_vertex_graph(31, 20, p=0.25)
    for r in range(5):
        population = len(g.eligible_sinks(r))
        if not population:
            continue
        counters = Counters()
        cfg = DriverConfig(eps=Fraction(1, 4), k_star=10**9, k_grid=(2,), lambda_grid=(4,))
        approx_rooted_vc(g, r, cfg, counters)
        structures = len(powers_of_two_until(4))
        assert counters["local.queries"] <= structures * population


def test_global_vc_nocut():
    g = build_vertex_graph(4, [1] * 4, [(u, v) for u in range(4) for v in range(4) if u != v])
    with pytest.raises(NoCut):
        approx_global_vc(g)
