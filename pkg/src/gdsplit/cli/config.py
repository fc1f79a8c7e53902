"""Experiment configs: a YAML file holding declarations and parameters.

Layout (every key except ``system`` and ``splittings`` is optional)::

    name: my-run
    system: product(g=circle_g((3-sqrt(5))/2, (3+sqrt(5))/2), h=toral([2, 1], [1, 1]))
    splittings:
      E12_F3: "E = g + stable(h); F = unstable(h)"
    analyses: [classify, liminf]
    seed: 0
    params:
      S: 1
      lambda: 1.0
      epsilon: 0.3
      start: [0.25, 0.1, 0.2]
    output:
      plot_data: true
    expect:
      verdicts: {E12_F3: gds_not_dominated}

See ``PARAM_DEFAULTS`` for the full parameter list.  The output directory
is a run-time choice (``--out``) and is not part of the config.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field

import yaml

from ..analysis.domination import VERDICTS, GdsParams
from ..declarations import parse_splitting, parse_system
from ..errors import ConfigParseError, ConfigValidationError, ParameterError

ANALYSES = ("classify", "lyapunov", "recurrence", "lemma-search", "liminf", "minimality", "verify-example")

PARAM_DEFAULTS = {
    "S": 1,
    "lambda": 1.0,
    "epsilon": 0.3,
    "k_max": 50,
    "delta": 1e-6,
    "grid": None,  # null: 256 per circle axis, 64 per toral axis; int or per-axis list otherwise
    "extra_points": [],
    "start": None,  # null: 0.25 on every axis
    "n_max": 10000,
    "window": 1000,
    "N_max": 200,
    "n_schedule": [1, 10, 100, 1000],
    "measure_points": [],
    "bound_samples": 16,
    "bound_n_max": 1000,
    "lyapunov_n": 100000,
    "lyapunov_samples": 8,
    "lyapunov_fiber": None,  # {fixed: [...], free_axes: [...]} or null for uniform samples
    "minimality_n": 100000,
    "minimality_resolution": 1000,
    "minimality_axes": None,
}

_INT_PARAMS = ("S", "k_max", "n_max", "window", "N_max", "bound_samples", "bound_n_max",
               "lyapunov_n", "lyapunov_samples", "minimality_n", "minimality_resolution")
_TOP_KEYS = ("name", "system", "splittings", "analyses", "seed", "params", "output", "expect")


@dataclass
class ExperimentConfig:
    system: str
    splittings: dict
    analyses: list = field(default_factory=lambda: ["classify"])
    params: dict = field(default_factory=lambda: dict(PARAM_DEFAULTS))
    seed: int = 0
    plot_data: bool = True
    expect: dict = field(default_factory=dict)
    name: str = "experiment"

    def gds_params(self):
        p = self.params
        return GdsParams(S=p["S"], lam=p["lambda"], k_max=p["k_max"], delta=p["delta"])

    def build(self):
        """Parsed (system, {name: splitting}) pair."""
        system = parse_system(self.system)
        splittings = {k: parse_splitting(system, v, label=k, field=f"splittings.{k}")
                      for k, v in self.splittings.items()}
        return system, splittings

    def start_point(self, d):
        s = self.params["start"]
        return [0.25] * d if s is None else list(s)

    def to_dict(self):
        """Plain-data echo; ``from_dict(cfg.to_dict())`` rebuilds an equal config."""
        return {
            "name": self.name,
            "system": self.system,
            "splittings": dict(self.splittings),
            "analyses": list(self.analyses),
            "seed": self.seed,
            "params": copy.deepcopy(self.params),
            "output": {"plot_data": self.plot_data},
            "expect": copy.deepcopy(self.expect),
        }

    def to_yaml(self):
        return yaml.safe_dump(self.to_dict(), sort_keys=False, default_flow_style=None)

    @classmethod
    def from_dict(cls, raw):
        return _validate(raw)


def _bad(path, msg):
    raise ConfigValidationError(msg, path)


def _number(v, path):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        _bad(path, f"expected a finite number, got {v!r}")
    return v


def _point_list(v, path):
    if not isinstance(v, list) or not all(isinstance(p, list) for p in v):
        _bad(path, "expected a list of points")
    return [[float(_number(c, path)) for c in p] for p in v]


def _check_params(raw, d):
    if not isinstance(raw, dict):
        _bad("params", "expected a mapping")
    unknown = sorted(set(raw) - set(PARAM_DEFAULTS))
    if unknown:
        _bad(f"params.{unknown[0]}", "unknown parameter")
    p = dict(PARAM_DEFAULTS)
    p.update(raw)
    for k in _INT_PARAMS:
        v = p[k]
        if isinstance(v, bool) or not isinstance(v, int) or v < 1:
            _bad(f"params.{k}", f"expected a positive integer, got {v!r}")
    for k in ("lambda", "epsilon", "delta"):
        p[k] = float(_number(p[k], f"params.{k}"))
    try:
        GdsParams(S=p["S"], lam=p["lambda"], k_max=p["k_max"], delta=p["delta"])
    except ParameterError as exc:
        raise ConfigValidationError(str(exc), exc.field) from None
    if p["epsilon"] <= 0 or p["epsilon"] >= 1.0 / p["lambda"]:
        _bad("params.epsilon", f"need 0 < epsilon < 1/lambda, got {p['epsilon']!r}")
    if p["window"] > p["n_max"]:
        _bad("params.window", "window must not exceed n_max")
    g = p["grid"]
    if g is not None:
        if isinstance(g, int) and not isinstance(g, bool):
            ok = g >= 1
        else:
            ok = isinstance(g, list) and len(g) == d and all(isinstance(r, int) and r >= 1 for r in g)
        if not ok:
            _bad("params.grid", f"expected null, a positive integer or {d} positive integers")
    for k in ("extra_points", "measure_points"):
        p[k] = _point_list(p[k], f"params.{k}")
        if any(len(q) != d for q in p[k]):
            _bad(f"params.{k}", f"points must have {d} coordinates")
    if p["start"] is not None:
        p["start"] = _point_list([p["start"]], "params.start")[0]
        if len(p["start"]) != d:
            _bad("params.start", f"expected {d} coordinates")
    sched = p["n_schedule"]
    if not isinstance(sched, list) or not sched or not all(isinstance(n, int) and n >= 1 for n in sched):
        _bad("params.n_schedule", "expected a nonempty list of positive integers")
    fib = p["lyapunov_fiber"]
    if fib is not None:
        if not isinstance(fib, dict) or set(fib) != {"fixed", "free_axes"}:
            _bad("params.lyapunov_fiber", "expected {fixed: [...], free_axes: [...]}")
        fib["fixed"] = _point_list([fib["fixed"]], "params.lyapunov_fiber.fixed")[0]
        if len(fib["fixed"]) != d or not all(isinstance(a, int) and 0 <= a < d for a in fib["free_axes"]):
            _bad("params.lyapunov_fiber", f"fixed needs {d} coordinates and free_axes indices below {d}")
    axes = p["minimality_axes"]
    if axes is not None and (not isinstance(axes, list) or not all(isinstance(a, int) and 0 <= a < d for a in axes)):
        _bad("params.minimality_axes", f"expected null or axis indices below {d}")
    return p


def _validate(raw):
    if not isinstance(raw, dict):
        _bad("<root>", "config must be a mapping")
    unknown = sorted(set(raw) - set(_TOP_KEYS))
    if unknown:
        _bad(unknown[0], "unknown key")
    for k in ("system", "splittings"):
        if k not in raw:
            _bad(k, "required")
    if not isinstance(raw["system"], str):
        _bad("system", "expected a declaration string")
    spl = raw["splittings"]
    if not isinstance(spl, dict) or not spl or not all(isinstance(v, str) for v in spl.values()):
        _bad("splittings", "expected a mapping of names to declaration strings")
    system = parse_system(raw["system"])
    for k, v in spl.items():
        parse_splitting(system, v, label=str(k), field=f"splittings.{k}")
    analyses = raw.get("analyses", ["classify"])
    if isinstance(analyses, str):
        analyses = [analyses]
    if analyses == ["all"]:
        analyses = list(ANALYSES)
    for i, a in enumerate(analyses):
        if a not in ANALYSES:
            _bad(f"analyses[{i}]", f"unknown analysis {a!r}; choose from {', '.join(ANALYSES)} or all")
    seed = raw.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        _bad("seed", "expected an unsigned 64-bit integer")
    params = _check_params(raw.get("params") or {}, system.d)
    out = raw.get("output") or {}
    if not isinstance(out, dict) or set(out) - {"plot_data"}:
        _bad("output", "only 'plot_data' is configurable; the directory comes from --out")
    expect = raw.get("expect") or {}
    if not isinstance(expect, dict) or set(expect) - {"verdicts", "lyapunov", "lyapunov_tol"}:
        _bad("expect", "allowed keys: verdicts, lyapunov, lyapunov_tol")
    for k, v in (expect.get("verdicts") or {}).items():
        if k not in spl:
            _bad(f"expect.verdicts.{k}", "no such splitting")
        if v not in VERDICTS:
            _bad(f"expect.verdicts.{k}", f"unknown verdict {v!r}")
    if "lyapunov" in expect and (not isinstance(expect["lyapunov"], list) or len(expect["lyapunov"]) != system.d):
        _bad("expect.lyapunov", f"expected {system.d} exponents")
    return ExperimentConfig(
        system=raw["system"],
        splittings={str(k): v for k, v in spl.items()},
        analyses=list(analyses),
        params=params,
        seed=int(seed),
        plot_data=bool(out.get("plot_data", True)),
        expect=copy.deepcopy(expect),
        name=str(raw.get("name", "experiment")),
    )


def parse_config_text(text: str) -> ExperimentConfig:
    """Parse and validate YAML text.

    Raises:
        ConfigParseError: malformed YAML or declaration (with line and column).
        ConfigValidationError: a value is out of range (with its field path).
    """
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        msg = getattr(exc, "problem", None) or str(exc)
        if mark is None:
            raise ConfigParseError(f"YAML: {msg}") from None
        raise ConfigParseError(f"YAML: {msg}", mark.line + 1, mark.column + 1) from None
    return _validate(raw)


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config_text(fh.read())
