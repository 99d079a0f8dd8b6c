"""Vertex cuts: one root, then the global minimum, on the bundled bridge graph."""

from fractions import Fraction
from pathlib import Path

from dircut import DriverConfig, approx_global_vc, approx_rooted_vc, exact_global_vc, parse_graph

g = parse_graph((Path(__file__).parent / "graphs" / "bridge.txt").read_text())
cfg = DriverConfig(eps=Fraction(1, 4), seed=3)

rooted = approx_rooted_vc(g, 0, cfg).best
print(f"rooted at 0: separator {sorted(rooted.cut_elements)} weight {rooted.weight}")
best = approx_global_vc(g, cfg).best
print(f"global: separator {sorted(best.cut_elements)} weight {best.weight} (exact {exact_global_vc(g).weight})")
