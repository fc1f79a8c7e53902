"""Execute the analyses selected in an ExperimentConfig."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import __version__
from ..analysis import (
    EmpiricalMeasure,
    asymptotic_ratio_bound_check,
    check_dominated,
    check_gds,
    convergence_trace,
    declared_minimality,
    liminf_probe,
    lyapunov_spectra,
    measure_average_inf,
    minimality_probe,
    proof_bound_check,
    uniform_negativity_search,
)
from ..cocycle import a_profile, sandwich_constant
from ..grids import GridSpec
from ..splittings import check_invariance
from .config import ANALYSES, ExperimentConfig
from .output import PlotTable, dumps_canonical, emit_plot_data, plain

CAVEATS = {
    "grid": "for-all-x claims are checked on a finite grid: violations are conclusive, passes are evidence only",
    "k_max": "condition (2) is checked for k = 1..k_max only",
    "C": "the sandwich constant C is reported both in closed form and as a grid estimate (a lower bound for the sup)",
    "measures": "empirical measures stand in for invariant measures; no claim is made about all ergodic measures",
    "minimality": "box-counting density is evidence about minimality, not a proof",
}

WITNESS_STEPS = 10


@dataclass
class RunReport:
    """Payload (deterministic for a given config) plus run metadata."""

    payload: dict
    timing: dict
    tables: dict = field(default_factory=dict)

    @property
    def checks(self):
        return self.payload["checks"]

    @property
    def all_checks_passed(self):
        return all(c["passed"] for c in self.checks)

    def payload_json(self) -> str:
        return dumps_canonical(self.payload)

    def write(self, out_dir) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(self.payload_json(), encoding="ascii")
        meta = {"timing_seconds": self.timing, "created_unix": time.time(), "tool_version": __version__}
        (out / "meta.json").write_text(dumps_canonical(meta), encoding="ascii")
        (out / "summary.txt").write_text(self.summary(), encoding="utf-8")
        for name, table in self.tables.items():
            emit_plot_data(table, out / f"{name}.csv")
        return out

    def summary(self) -> str:
        p = self.payload
        lines = [f"gdsplit {p['tool']['version']}  run: {p['config']['name']}  seed: {p['config']['seed']}",
                 f"system: {p['config']['system']}", ""]
        for analysis, res in p["results"].items():
            lines.append(f"[{analysis}]")
            lines.extend("  " + s for s in _summarize(analysis, res))
        if p["checks"]:
            lines.append("")
            lines.append("[checks]")
            for c in p["checks"]:
                lines.append(f"  {'PASS' if c['passed'] else 'FAIL'}  {c['name']}: {c['detail']}")
        lines.append("")
        lines.append("[caveats]")
        lines.extend(f"  - {v}" for v in p["caveats"].values())
        return "\n".join(lines) + "\n"


def _fmt(v):
    return "n/a" if v is None else f"{v:.6g}"


def _summarize(analysis, res):
    out = []
    if analysis in ("classify", "verify-example"):
        for name, r in res["splittings"].items():
            g = r["gds"]
            line = f"{name}: {g['verdict']}  max a_kS = {_fmt(g['worst_ratio_log'])}"
            if g["witness_x0"] is not None:
                line += f"  witness {g['witness_x0']} a_S = {_fmt(g['witness_log_ratio'])}"
            if "violation_growth_rate_per_step" in g:
                line += f"  growth {_fmt(g['violation_growth_rate_per_step'])}/step"
            out.append(line)
        if "lyapunov" in res:
            out.append(f"lyapunov mean: {[round(v, 8) for v in res['lyapunov']['mean']]}")
    elif analysis == "lyapunov":
        out.append(f"mean exponents: {[round(v, 8) for v in res['mean']]}  (n = {res['n']}, {res['samples']} samples)")
    elif analysis == "recurrence":
        for name, r in res.items():
            rec = r["recurrence"]
            out.append(f"{name}: visits {rec['visits']}  chi* = {_fmt(rec['chi_star'])}  "
                       f"bound {'holds' if r['passed'] else 'fails'} ({r['reason']})")
    elif analysis == "lemma-search":
        for name, r in res["splittings"].items():
            out.append(f"{name}: N = {r['search']['N']}  tau = {_fmt(r['search']['tau'])}")
        for m in res["measures"]:
            out.append(f"{m['splitting']}: dirac at {m['point']}: inf (1/n) a_n = {_fmt(m['inf'])}")
    elif analysis == "liminf":
        for name, r in res.items():
            out.append(f"{name}: min a_n/n over window = {_fmt(r['liminf'])}")
    elif analysis == "minimality":
        out.append(f"declared: {res['declared']}  density fraction = {_fmt(res['fraction'])}")
    return out


# ---------------------------------------------------------------------------


class _Context:
    def __init__(self, config: ExperimentConfig, threads):
        self.config = config
        self.p = config.params
        self.threads = max(1, int(threads))
        self.system, self.splittings = config.build()
        self.grid = _grid(self.system, self.p)
        self.start = np.asarray(config.start_point(self.system.d), dtype=float)
        self.tables = {}
        self.checks = []

    def rng(self, analysis):
        # one stream per analysis, independent of which others run
        return np.random.default_rng([self.config.seed, ANALYSES.index(analysis)])

    def check(self, name, passed, detail):
        self.checks.append({"name": name, "passed": bool(passed), "detail": detail})


def _grid(system, p):
    g, extra = p["grid"], p["extra_points"] or None
    if g is None:
        return GridSpec.default(system, extra)
    if isinstance(g, int):
        return GridSpec.uniform(system, g, extra)
    return GridSpec(tuple(g), extra)


def _classify_one(ctx, name, sp, rng):
    system, p = ctx.system, ctx.p
    params = ctx.config.gds_params()
    gds = check_gds(system, sp, params, ctx.grid, threads=ctx.threads)
    out = {"gds": gds.to_dict(), "invariance": check_invariance(system, sp, ctx.grid).to_dict()}
    if params.lam < 1.0:
        out["dominated"] = check_dominated(system, sp, params.S, params.lam, ctx.grid, params.delta,
                                           ctx.threads).to_dict()
    else:
        out["dominated"] = {"skipped": "classical check needs lambda < 1; see gds.dominated_lambda"}
    out["sandwich"] = {"C_closed_form": system.sup_norm_bound(),
                       "C_grid_estimate": sandwich_constant(system, ctx.grid),
                       "C_grid_label": "grid estimate (lower bound for the sup)"}
    if gds.details["condition2_holds"]:
        samples = rng.random((p["bound_samples"], system.d))
        sched = np.unique(np.geomspace(1, p["bound_n_max"], 20).astype(int))
        out["asymptotic_bound"] = asymptotic_ratio_bound_check(system, sp, params, samples, sched).to_dict()
    pts = ctx.grid.evaluation_points(system, collapse=sp.constant)
    a_s = a_profile(system, sp, pts, [params.S], threads=ctx.threads)[0]
    cols = [f"x{k + 1}" for k in range(system.d)] + [f"a_{params.S}"]
    ctx.tables[f"ratio_profile_{name}"] = PlotTable(cols, [list(x) + [a] for x, a in zip(pts, a_s)])
    return out, gds, pts, a_s


def _run_classify(ctx):
    rng = ctx.rng("classify")
    res = {}
    for name, sp in ctx.splittings.items():
        res[name] = _classify_one(ctx, name, sp, rng)[0]
        _verdict_check(ctx, name, res[name]["gds"]["verdict"])
    return {"splittings": res}


def _verdict_check(ctx, name, verdict):
    want = (ctx.config.expect.get("verdicts") or {}).get(name)
    if want is not None:
        ctx.check(f"verdict {name}", verdict == want, f"expected {want}, got {verdict}")


def _lyapunov_points(ctx, rng):
    p = ctx.p
    fib = p["lyapunov_fiber"]
    if fib is None:
        return rng.random((p["lyapunov_samples"], ctx.system.d))
    seed = int(rng.integers(0, 2**63))
    return EmpiricalMeasure.fiber_product(fib["fixed"], fib["free_axes"], p["lyapunov_samples"], seed).points


def _run_lyapunov(ctx, analysis="lyapunov"):
    pts = _lyapunov_points(ctx, ctx.rng(analysis))
    spectra = lyapunov_spectra(ctx.system, pts, ctx.p["lyapunov_n"])
    mean = spectra.mean(axis=0)
    res = {"n": ctx.p["lyapunov_n"], "samples": len(pts), "points": pts, "spectra": spectra,
           "mean": mean, "sum_of_mean": float(mean.sum())}
    want = ctx.config.expect.get("lyapunov")
    if want is not None:
        tol = float(ctx.config.expect.get("lyapunov_tol", 1e-4))
        err = float(np.max(np.abs(spectra - np.asarray(want)[None, :])))
        res["max_abs_error"] = err
        ctx.check("lyapunov spectrum", err <= tol, f"max deviation {err:.3e} (tolerance {tol:g})")
    return res


def _run_verify(ctx):
    rng = ctx.rng("verify-example")
    S = ctx.p["S"]
    res = {}
    for name, sp in ctx.splittings.items():
        out, gds, pts, a_s = _classify_one(ctx, name, sp, rng)
        _verdict_check(ctx, name, gds.verdict)
        if gds.verdict in ("gds_not_dominated", "conditions12_only"):
            # the point of largest one-step ratio blocks classical domination
            x = pts[int(np.argmax(a_s))]
            prof = a_profile(ctx.system, sp, x[None, :], [k * S for k in range(1, WITNESS_STEPS + 1)])[:, 0]
            out["non_domination_witness"] = {"x": x, "a_kS": prof, "max_abs": float(np.max(np.abs(prof)))}
        res[name] = out
    return {"splittings": res, "lyapunov": _run_lyapunov(ctx, "verify-example")}


def _run_recurrence(ctx):
    p = ctx.p
    res = {}
    for name, sp in ctx.splittings.items():
        rep = proof_bound_check(ctx.system, sp, p["S"], p["lambda"], p["epsilon"], ctx.start, p["n_max"])
        res[name] = rep.to_dict()
        res[name]["bound_rate"] = math.log(1.0 - p["epsilon"] * p["lambda"])
        ctx.tables[f"bound_trace_{name}"] = PlotTable(["i", "t_i", "c_t_i", "bound"], rep.trace_rows())
    return res


def _run_lemma(ctx):
    p = ctx.p
    res = {}
    for name, sp in ctx.splittings.items():
        found = uniform_negativity_search(ctx.system, sp, ctx.grid, p["N_max"], threads=ctx.threads)
        entry = {"search": found.to_dict()}
        if found.found and found.tau < 1.0:
            tau2 = 0.5 * (found.tau + 1.0)
            again = check_dominated(ctx.system, sp, found.N, tau2, ctx.grid, p["delta"], ctx.threads)
            entry["recheck"] = {"N": found.N, "lambda": tau2, "verdict": again.verdict}
        res[name] = entry
    measures = []
    for x in p["measure_points"]:
        mu = EmpiricalMeasure.dirac(x)
        for name, sp in ctx.splittings.items():
            measures.append({"point": x, "splitting": name, "n_schedule": p["n_schedule"],
                             "inf": measure_average_inf(ctx.system, sp, mu, p["n_schedule"])})
    return {"splittings": res, "measures": measures}


def _run_liminf(ctx):
    p = ctx.p
    res = {}
    ns = np.unique(np.geomspace(1, p["n_max"], 60).astype(int))
    for name, sp in ctx.splittings.items():
        val = liminf_probe(ctx.system, sp, ctx.start, p["n_max"], p["window"])
        trace = convergence_trace(ctx.system, sp, ctx.start, ns)
        res[name] = {"x": ctx.start, "n_max": p["n_max"], "window": p["window"], "liminf": val,
                     "negative": val < 0}
        ctx.tables[f"convergence_{name}"] = PlotTable(["n", "a_n_over_n"], trace)
    return res


def _run_minimality(ctx):
    p = ctx.p
    frac = minimality_probe(ctx.system, ctx.start, p["minimality_n"], p["minimality_resolution"],
                            p["minimality_axes"])
    return {"declared": declared_minimality(ctx.system), "fraction": frac, "x": ctx.start,
            "n": p["minimality_n"], "resolution_per_axis": p["minimality_resolution"],
            "axes": p["minimality_axes"]}


_RUNNERS = {
    "classify": _run_classify,
    "lyapunov": _run_lyapunov,
    "recurrence": _run_recurrence,
    "lemma-search": _run_lemma,
    "liminf": _run_liminf,
    "minimality": _run_minimality,
    "verify-example": _run_verify,
}


def run(config: ExperimentConfig, analyses=None, threads=1) -> RunReport:
    """Run the selected analyses (default: those listed in the config)."""
    ctx = _Context(config, threads)
    selected = list(analyses or config.analyses)
    results, timing = {}, {}
    for name in selected:
        t0 = time.perf_counter()
        results[name] = plain(_RUNNERS[name](ctx))
        timing[name] = time.perf_counter() - t0
    payload = {
        "tool": {"name": "gdsplit", "version": __version__},
        "config": config.to_dict(),
        "analyses_run": selected,
        "results": results,
        "checks": ctx.checks,
        "caveats": CAVEATS,
    }
    return RunReport(payload=plain(payload), timing=timing, tables=ctx.tables if config.plot_data else {})
