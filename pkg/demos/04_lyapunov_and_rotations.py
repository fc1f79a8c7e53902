"""Lyapunov exponents of g x cat, and the degenerate case of rotations.

On the attracting fiber {0} x T^2 all three exponents are nonzero:
ln lambda_s twice (g and the stable line) and ln lambda_u once.
A rotation has zero exponents and a_n = 0 identically, so conditions (1)
and (2) hold but no strict contraction exists anywhere.

Run:  python3 demos/04_lyapunov_and_rotations.py
"""

import math

import numpy as np

from gdsplit import build_rotation, example_3_1, splitting_from_terms
from gdsplit.analysis import (
    EmpiricalMeasure,
    GdsParams,
    check_gds,
    lyapunov_spectra,
    minimality_probe,
)
from gdsplit.systems import ProductSystem

system = example_3_1()
mu = EmpiricalMeasure.fiber_product([0, 0, 0], [1, 2], 4, seed=1)
spectra = lyapunov_spectra(system, mu.points, 20_000)
print("exponents on {0} x T^2:")
print(np.array2string(spectra, precision=8))
print(f"expected: +-{math.log((3 + math.sqrt(5)) / 2):.8f}")

golden, root2 = (math.sqrt(5) - 1) / 2, math.sqrt(2) - 1
for freqs, flag in (((golden, root2), "known-minimal"), ((0.25, 1 / 3), "known-non-minimal")):
    rot = ProductSystem([("r", build_rotation(freqs, flag))])
    sp = splitting_from_terms(rot, [("axis", "r", 0)], [("axis", "r", 1)])
    verdict = check_gds(rot, sp, GdsParams(S=1, lam=1.0)).verdict
    frac = minimality_probe(rot, [0.0, 0.0], 100_000, 100)
    print(f"rotation {tuple(round(f, 4) for f in freqs)}: {verdict}, boxes visited {frac:.4f}")
