from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dircut.graph import GraphError, NoCut, build_graph, build_vertex_graph, in_cut_weight, reachable
from dircut.instrument import Counters
from dircut.local import build_local_ec
from dircut.maxflow import FlowNetwork, VertexFlowNetwork, max_flow, vertex_max_flow
from dircut.sparsify import SparsifyParams

from conftest import edge_graphs, random_edge_graph, random_vertex_graph


def test_single_edge():
    assert max_flow(build_graph(2, [(0, 1, 7)]), 0, 1).value == 7


def test_two_paths():
    g = build_graph(4, [(0, 1, 2), (1, 3, 9), (0, 2, 8), (2, 3, 3)])
    assert max_flow(g, 0, 3).value == 5


def test_rational_capacities():
    g = build_graph(3, [(0, 1, Fraction(1, 3)), (0, 2, Fraction(1, 2)), (1, 2, 1)])
    assert max_flow(g, 0, 2).value == Fraction(5, 6)


def test_unreachable_sink():
    res = max_flow(build_graph(3, [(0, 1, 4)]), 0, 2)
    assert res.value == 0 and res.source_side == {0, 1}


def test_same_terminal_rejected():
    with pytest.raises(GraphError):
        max_flow(build_graph(2, [(0, 1, 1)]), 1, 1)


def _brute_st(g, s, t):
    others = [v for v in range(g.n) if v not in (s, t)]
    best = None
    for r in range(len(others) + 1):
        for extra in combinations(others, r):
            w = in_cut_weight(g, set(range(g.n)) - {s, *extra})
            best = w if best is None else min(best, w)
    return best


def test_matches_bipartition_brute_force():
    gen = np.random.default_rng(3)
    for seed in range(40):
        g = random_edge_graph(seed, 10, p=0.3, wmax=9)
        s, t = (int(x) for x in gen.choice(10, 2, replace=False))
        res = max_flow(g, s, t)
        assert res.value == _brute_st(g, s, t)
        assert res.value == in_cut_weight(g, set(range(10)) - res.source_side)


@settings(max_examples=80)
@given(edge_graphs(max_n=7), st.data())
def test_duality_and_source_minimal_side(g, data):
    s = data.draw(st.integers(0, g.n - 1))
    t = data.draw(st.integers(0, g.n - 1).filter(lambda x: x != s))
    res = max_flow(g, s, t)
    sink_side = set(range(g.n)) - res.source_side
    assert res.value == in_cut_weight(g, sink_side)
    assert res.value == sum(g.weights[e] for e in res.min_cut_edges)
    assert s in res.source_side and t not in res.source_side


@settings(max_examples=60)
@given(edge_graphs(max_n=7), st.data())
def test_adding_an_edge_never_decreases_flow(g, data):
    s = data.draw(st.integers(0, g.n - 1))
    t = data.draw(st.integers(0, g.n - 1).filter(lambda x: x != s))
    u = data.draw(st.integers(0, g.n - 1))
    v = data.draw(st.integers(0, g.n - 1))
    bigger = build_graph(g.n, g.edges() + [(u, v, data.draw(st.integers(1, 20)))])
    assert max_flow(bigger, s, t).value >= max_flow(g, s, t).value


def test_cutoff_truncates():
    g = build_graph(2, [(0, 1, 7)])
    counters = Counters()
    value, _, truncated = FlowNetwork(g, counters).solve_raw(0, 1, cutoff=3)
    assert truncated and value >= 3
    assert counters["flow.truncated"] == 1 and counters["flow.verified"] == 0


def test_vertex_path():
    res = vertex_max_flow(build_vertex_graph(3, [1, 4, 1], [(0, 1), (1, 2)]), 0, 2)
    assert res.value == 4 and res.separator == {1}


def test_vertex_two_paths():
    g = build_vertex_graph(4, [1, 2, 5, 1], [(0, 1), (1, 3), (0, 2), (2, 3)])
    res = vertex_max_flow(g, 0, 3)
    assert res.value == 7 and res.separator == {1, 2}


def test_vertex_adjacent_is_nocut():
    with pytest.raises(NoCut):
        vertex_max_flow(build_vertex_graph(2, [1, 1], [(0, 1)]), 0, 1)


def _brute_separator(g, s, t):
    others = [v for v in range(g.n) if v not in (s, t)]
    best = None
    for r in range(len(others) + 1):
        for sep in combinations(others, r):
            if t not in reachable(g.n, g.out_neighbors, s, set(sep)):
                w = sum(g.vertex_weights[v] for v in sep)
                best = w if best is None else min(best, w)
    return best


def test_vertex_matches_separator_enumeration():
    for seed in range(40):
        g = random_vertex_graph(seed, 7)
        net = VertexFlowNetwork(g, 0)
        for t in range(1, 7):
            if g.has_edge(0, t):
                continue
            res = net.solve(t)
            assert res.value == _brute_separator(g, 0, t)
            assert res.value == sum(g.vertex_weights[v] for v in res.separator)
            assert t not in reachable(g.n, g.out_neighbors, 0, res.separator)


def test_agrees_with_local_flow_count():
    """A local query that stops below its target has routed a maximum flow."""
    checked = 0
    for seed in range(20):
        g = random_edge_graph(seed, 8, p=0.3)
        p = SparsifyParams(eps=Fraction(1, 5), lambda_guess=40, k_guess=4, rng_seed=seed)
        s = build_local_ec(g, 0, p)
        sg = s.sparse
        for t in range(1, 8):
            ans = s.query(t)
            if ans.above or t not in sg.index:
                continue
            assert max_flow(sg.graph, sg.root, sg.index[t]).value == ans.flow_units
            checked += 1
    assert checked > 50
