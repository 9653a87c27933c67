"""
Metrics with an integral cone order
===================================

With integral orders the developing map is explicit: a rational function,
or z^mu times one.  Its poles are the roots of a residue system.
"""

import numpy as np

from conemetric import Divisor, solve_h1, solve_h3
from conemetric.errors import NoSolution
from conemetric.metriceval import ExplicitMetric, expected_area, schwarzian_residual, total_area

# three integral orders: a rational map
(s,) = solve_h3(Divisor((2, 2, 2)))
print("H3 (2,2,2): poles", np.round(s.roots, 12), "degree", s.g.degree)

# one integral order: two families of solutions
d = Divisor((0.5, 2, 0.5))
for s in solve_h1(d):
    metric = ExplicitMetric.from_solution(s)
    z = np.array([0.3 + 0.4j, -1.2 + 0.5j])
    print(f"H1 case {s.case}: N = {s.N}, mu = {s.mu:g}, roots {np.round(s.roots, 6)}")
    print(f"   area {total_area(metric, res=200):.6f} vs {expected_area(d):.6f},"
          f" max |S - 2Q| {schwarzian_residual(metric, z).max():.1e}")

# some orders admit nothing at all
try:
    solve_h1(Divisor((0.5, 1, 0.5)))
except NoSolution as exc:
    print("(0.5, 1, 0.5):", exc, "| proven" if exc.proven else "| search only")
