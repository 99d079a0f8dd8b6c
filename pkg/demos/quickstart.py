"""Approximate and exact minimum cuts on a small random digraph."""

from fractions import Fraction

import numpy as np

from dircut import (
    DriverConfig,
    approx_global_ec,
    approx_rooted_ec,
    build_graph,
    exact_global_ec,
    exact_rooted_ec,
)

gen = np.random.default_rng(0)
n = 40
edges = [(u, v, int(gen.integers(1, 21))) for u in range(n) for v in range(n) if u != v and gen.random() < 0.2]
g = build_graph(n, edges)

cfg = DriverConfig(eps=Fraction(1, 5), seed=1)
report = approx_rooted_ec(g, 0, cfg)
print(f"rooted from 0: approx {report.best.weight}, exact {exact_rooted_ec(g, 0).weight}")
print(f"  sink component {sorted(report.best.sink_component)}")
print(f"  {report.candidates_examined} candidate sinks over {len(report.guesses)} (lambda, k) guesses")
print(f"global: approx {approx_global_ec(g, cfg).best.weight}, exact {exact_global_ec(g).weight}")
