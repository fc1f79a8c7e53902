"""Why a generalized dominated splitting wants a non-minimal map.

Points of A_eps = {x : ratio after S steps < 1/lambda - eps} pay a factor
(1 - eps lambda) every time the S-step orbit visits.  Visits happen with
frequency chi*, so a_n(x)/n is pushed below chi* ln(1 - eps lambda).  On
the g x cat example every orbit off the repelling fiber drifts to the
attracting fiber, visits A_eps forever, and the bound is easy to watch.

Run:  python3 demos/02_recurrence.py
"""

import math

from gdsplit import example_3_1, splitting_from_terms
from gdsplit.analysis import convergence_trace, liminf_probe, proof_bound_check

system = example_3_1()
sp = splitting_from_terms(system, [("factor", "g"), ("stable", "h")], [("unstable", "h")])
S, lam, eps = 1, 1.0, 0.3
x = [0.25, 0.1, 0.2]

rep = proof_bound_check(system, sp, S, lam, eps, x, 10_000)
print(f"hypothesis: {rep.reason}")
print(f"chi* = {rep.record.chi_star:.4f} over {rep.record.n_max} steps")
print(f"bound holds at every visit: {rep.passed}  (smallest margin {rep.margins.min():.2e})")
print(f"slope a_n/n at n_max = {rep.final_slope:.5f}, forced at most {rep.predicted_slope:.5f}")

print("\n   i   t_i     c_t_i      i ln(0.7)")
for row in rep.trace_rows()[:: len(rep.trace_rows()) // 8]:
    print("{:4d} {:5d} {:10.4f} {:12.4f}".format(*row))

print("\n   n   a_n/n")
for n, v in convergence_trace(system, sp, x, [1, 10, 100, 1000, 10_000]):
    print(f"{n:6d}  {v: .6f}")
print(f"\nliminf probe: {liminf_probe(system, sp, x, 10_000, 1000):.6f}  "
      f"(ln lambda_s - ln lambda_u = {2 * math.log((3 - 5 ** 0.5) / 2):.6f})")
