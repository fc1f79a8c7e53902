"""When does a_N(x) < 0 hold uniformly for some N?

If every invariant measure gives (1/n) int a_n dmu a negative value, some
a_N is negative everywhere and the splitting is dominated with constant
tau = exp(max a_N).  The cat map satisfies this at N = 1.  The g x cat
splitting fails it: the Dirac measure on the repelling fiber has average 0,
and the search finds no N.

Run:  python3 demos/03_uniform_negativity.py
"""

import math

from gdsplit import CAT_MATRIX, build_toral, example_3_1, splitting_from_terms
from gdsplit.analysis import EmpiricalMeasure, measure_average_profile, uniform_negativity_search
from gdsplit.systems import ProductSystem

cat = ProductSystem([("h", build_toral(CAT_MATRIX))])
cat_split = splitting_from_terms(cat, [("stable", "h")], [("unstable", "h")])
res = uniform_negativity_search(cat, cat_split)
print(f"cat map: N = {res.N}, tau = {res.tau:.12f}, lambda_s^2 = {((3 - math.sqrt(5)) / 2) ** 2:.12f}")

system = example_3_1()
sp = splitting_from_terms(system, [("factor", "g"), ("stable", "h")], [("unstable", "h")])
res = uniform_negativity_search(system, sp, N_max=200)
print(f"g x cat: N = {res.N}; max_x a_n(x) for n = 1, 50, 200: "
      f"{res.max_a[0]:.2e}, {res.max_a[49]:.2e}, {res.max_a[199]:.2e}")

schedule = [1, 10, 100, 1000]
for label, point in (("fiber 1/2", [0.5, 0.3, 0.7]), ("fiber 0  ", [0.0, 0.3, 0.7])):
    prof = measure_average_profile(system, sp, EmpiricalMeasure.dirac(point), schedule)
    print(f"Dirac on {label}: (1/n) a_n = " + ", ".join(f"{v: .4f}" for v in prof))
