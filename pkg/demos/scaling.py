"""Edge-traversal counts of the rooted edge pipeline on the planted-sink family."""

import sys
from fractions import Fraction

from dircut.bench import n2_polylog, run_bench

sizes = [int(x) for x in sys.argv[1:]] or [128, 256, 512]
summary = run_bench("planted", sizes, Fraction(1, 4), trials=1, seed=0)
print(summary.table())
for row in summary.rows:
    print(f"n={row.n}: traversals / (n^2 log^2 n) = {row.traversals / n2_polylog(row.n):.1f}")
