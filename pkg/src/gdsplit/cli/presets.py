"""Built-in experiment configs, one per worked example."""

from __future__ import annotations

from .config import parse_config_text

_EXAMPLE_SYSTEM = "product(g=circle_g(alpha=(3-sqrt(5))/2, beta=(3+sqrt(5))/2), h=toral([2, 1], [1, 1]))"

_EXAMPLE_SPLITTINGS = """\
splittings:
  E12_F3: "E = g + stable(h); F = unstable(h)"
  E2_F13: "E = stable(h); F = g + unstable(h)"
  E1_F23: "E = g; F = stable(h) + unstable(h)"
"""

PRESETS = {
    "verify-example": (
        "Three splittings of the circle map g times the cat map: verdicts, spectrum, proof bound",
        f"""\
name: verify-example
system: {_EXAMPLE_SYSTEM}
{_EXAMPLE_SPLITTINGS}analyses: [verify-example, recurrence, lemma-search, liminf]
seed: 0
params:
  S: 1
  lambda: 1.0
  epsilon: 0.3
  k_max: 50
  start: [0.25, 0.1, 0.2]
  extra_points: [[0.5, 0.0, 0.0]]
  measure_points: [[0.0, 0.3, 0.7], [0.5, 0.3, 0.7]]
  n_max: 10000
  N_max: 200
  lyapunov_n: 100000
  lyapunov_samples: 8
  lyapunov_fiber: {{fixed: [0.0, 0.0, 0.0], free_axes: [1, 2]}}
expect:
  verdicts: {{E12_F3: gds_not_dominated, E2_F13: gds_not_dominated, E1_F23: not_gds}}
  lyapunov: [-0.9624236501192069, -0.9624236501192069, 0.9624236501192069]
  lyapunov_tol: 1.0e-4
""",
    ),
    "g-cat-dominated": (
        "Same product with g'(1/2) lowered to 2: the GDS becomes dominated",
        """\
name: g-cat-dominated
system: product(g=circle_g(alpha=(3-sqrt(5))/2, beta=2), h=toral([2, 1], [1, 1]))
splittings:
  E12_F3: "E = g + stable(h); F = unstable(h)"
analyses: [classify, lemma-search]
seed: 0
params:
  S: 1
  lambda: 1.0
  N_max: 20
expect:
  verdicts: {E12_F3: dominated}
""",
    ),
    "cat-map": (
        "Cat map with its stable/unstable splitting (classical domination)",
        """\
name: cat-map
system: toral([2, 1], [1, 1])
splittings:
  Es_Fu: "E = stable(f0); F = unstable(f0)"
analyses: [classify, lyapunov, recurrence, lemma-search, liminf]
seed: 0
params:
  S: 1
  lambda: 0.2
  epsilon: 0.5
  start: [0.1, 0.2]
  n_max: 2000
  window: 500
  N_max: 5
  lyapunov_n: 10000
  lyapunov_samples: 4
expect:
  verdicts: {Es_Fu: dominated}
  lyapunov: [-0.9624236501192069, 0.9624236501192069]
  lyapunov_tol: 1.0e-6
""",
    ),
    "rotation-golden": (
        "Rotation of T^2 with frequencies (sqrt(5)-1)/2 and sqrt(2)-1, declared minimal",
        """\
name: rotation-golden
system: rotation((sqrt(5)-1)/2, sqrt(2)-1, flag="known-minimal")
splittings:
  E1_F2: "E = axis(f0, 0); F = axis(f0, 1)"
analyses: [classify, minimality]
seed: 0
params:
  S: 1
  lambda: 1.0
  minimality_n: 100000
  minimality_resolution: 100
expect:
  verdicts: {E1_F2: conditions12_only}
""",
    ),
    "rotation-rational": (
        "Rotation of T^2 with frequencies 1/4 and 1/3: periodic, not minimal",
        """\
name: rotation-rational
system: rotation(1/4, 1/3, flag="known-non-minimal")
splittings:
  E1_F2: "E = axis(f0, 0); F = axis(f0, 1)"
analyses: [classify, minimality]
seed: 0
params:
  S: 1
  lambda: 1.0
  minimality_n: 10000
  minimality_resolution: 100
expect:
  verdicts: {E1_F2: conditions12_only}
""",
    ),
}


def preset_names():
    return list(PRESETS)


def preset_text(name):
    try:
        return PRESETS[name][1]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}") from None


def load_preset(name):
    return parse_config_text(preset_text(name))
