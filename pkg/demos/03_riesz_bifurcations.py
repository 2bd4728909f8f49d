"""
Bifurcations of the Riesz s-energy
==================================

As s grows the square pyramid turns from a saddle into a local minimum, a
double tetrahedron branch is born from it, the pyramid undercuts the
bi-pyramid in energy, and finally the bi-pyramid loses stability. The scan
below tracks the smallest non-trivial Hessian eigenvalue of each family and
refines every sign change by bisection.
"""
import numpy as np

from embedded_newton.analysis import scan_bifurcations, scan_rows
from embedded_newton.families import solve_double_tetrahedron

for rec in scan_bifurcations(10.0, 25.0, 0.05):
    print(f"{rec.transition:16s} {rec.family:38s} s* = {rec.s_star:.10f}")

# The double tetrahedron: both heights negative just after it appears,
# then one of them crosses the equator once the bi-pyramid has bifurcated.
for s in (14.0, 15.0, 20.0, 22.0, 25.0):
    beta, gamma = solve_double_tetrahedron(s)
    print(f"s = {s:4.1f}  beta = {beta:+.6f}  gamma = {gamma:+.6f}")

# Data for a bifurcation diagram (energy per family along s).
rows = scan_rows(12.0, 24.0, 2.0)
for r in rows:
    print(f"{r['s']:5.1f} {r['family']:22s} E = {r['energy']:.8f}  index {r['morse_index']}")
