"""Three invariant splittings of the product g x cat on T^3.

g is a circle map fixing 0 (attracting, g'(0) = (3-sqrt5)/2) and 1/2
(repelling, g'(1/2) = (3+sqrt5)/2).  The cat map contributes a stable and an
unstable line.  Each way of grouping the three lines into E + F gives a
different answer to "is this splitting dominated?".

Run:  python3 demos/01_three_splittings.py
"""

import numpy as np

from gdsplit import GridSpec, a_profile, example_3_1, splitting_from_terms
from gdsplit.analysis import GdsParams, check_gds

system = example_3_1()
grid = GridSpec((256, 64, 64))
params = GdsParams(S=1, lam=1.0)

splittings = {
    "E = g + stable, F = unstable": ([("factor", "g"), ("stable", "h")], [("unstable", "h")]),
    "E = stable, F = g + unstable": ([("stable", "h")], [("factor", "g"), ("unstable", "h")]),
    "E = g, F = stable + unstable": ([("factor", "g")], [("stable", "h"), ("unstable", "h")]),
}

for title, terms in splittings.items():
    sp = splitting_from_terms(system, *terms)
    rep = check_gds(system, sp, params, grid)
    print(f"{title:32s} -> {rep.verdict}")
    if rep.witness_x0 is not None:
        best = rep.details["best_witness"].tolist()
        print(f"{'':32s}    strongest contraction at {best}: a_1 = {rep.details['best_witness_log_ratio']:.4f}")
    if rep.verdict == "not_gds":
        rate = rep.details["violation_growth_rate_per_step"]
        print(f"{'':32s}    a_k grows like {rate:.4f} k at x1 = {rep.worst_point[0]}")

# The first splitting is never uniformly contracting: on the repelling fiber
# the g-direction stretches exactly as much as the unstable line.
sp = splitting_from_terms(system, *splittings["E = g + stable, F = unstable"])
x1 = np.linspace(0, 1, 9)
pts = np.column_stack([x1, np.full(9, 0.3), np.full(9, 0.7)])
print("\n x1     a_1(x)")
for x, a in zip(x1, a_profile(system, sp, pts, [1])[0]):
    print(f"{x:5.3f}  {a: .6f}")
