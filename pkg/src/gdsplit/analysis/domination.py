"""Classical and generalized domination checks over sample grids."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..cocycle import a_profile, sandwich_constant
from ..errors import ParameterError
from ..grids import GridSpec
from ..systems import as_system, reduce_mod1

# slack allowed on "<= ln(lambda)" comparisons
COMPARE_TOL = 1e-9

VERDICTS = ("dominated", "gds_not_dominated", "conditions12_only", "not_gds", "not_dominated")

CONCLUSIVE = "violation found (conclusive)"
EVIDENCE = "no violation on grid (evidence, not proof)"


@dataclass(frozen=True)
class GdsParams:
    """S, lambda and the numerical truncations used by :func:`check_gds`.

    ``k_max`` truncates "for all k" in condition (2); ``delta`` is the
    margin that makes condition (3)'s strict inequality decidable.
    """

    S: int = 1
    lam: float = 1.0
    k_max: int = 50
    delta: float = 1e-6

    def __post_init__(self):
        if isinstance(self.S, bool) or int(self.S) != self.S or self.S < 1:
            raise ParameterError(f"S must be a positive integer, got {self.S!r}", field="GdsParams.S")
        if not (isinstance(self.lam, (int, float)) and math.isfinite(self.lam) and self.lam > 0):
            raise ParameterError(f"lambda must be a positive real, got {self.lam!r}", field="GdsParams.lambda")
        if int(self.k_max) != self.k_max or self.k_max < 1:
            raise ParameterError(f"k_max must be >= 1, got {self.k_max!r}", field="GdsParams.k_max")
        if not (math.isfinite(self.delta) and self.delta > 0):
            raise ParameterError(f"delta must be > 0, got {self.delta!r}", field="GdsParams.delta")

    def to_dict(self):
        return {"S": int(self.S), "lambda": float(self.lam), "k_max": int(self.k_max), "delta": float(self.delta)}


@dataclass
class DominationReport:
    verdict: str
    worst_ratio_log: float
    worst_point: np.ndarray
    params: GdsParams
    grid: GridSpec
    witness_x0: Optional[np.ndarray] = None
    witness_log_ratio: Optional[float] = None
    evidence: str = EVIDENCE
    details: dict = field(default_factory=dict)

    def to_dict(self):
        out = {
            "verdict": self.verdict,
            "worst_ratio_log": self.worst_ratio_log,
            "worst_point": np.asarray(self.worst_point).tolist(),
            "witness_x0": None if self.witness_x0 is None else np.asarray(self.witness_x0).tolist(),
            "witness_log_ratio": self.witness_log_ratio,
            "params": self.params.to_dict(),
            "grid": self.grid.describe(),
            "evidence": self.evidence,
        }
        out.update(_plain(self.details))
        return out


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _sweep(system, splitting, grid, steps, threads):
    system = as_system(system)
    grid = grid or GridSpec.default(system)
    pts = grid.evaluation_points(system, collapse=splitting.constant)
    return system, grid, pts, a_profile(system, splitting, pts, steps, threads)


def _first(mask):
    hits = np.flatnonzero(mask)
    return int(hits[0]) if hits.size else None


def check_dominated(system, splitting, S, lam, grid=None, delta=1e-6, threads=1) -> DominationReport:
    """(S, lambda)-domination: a_S(x) <= ln(lambda) at every grid point.

    Raises:
        ParameterError: lambda outside (0, 1).
    """
    if not (0.0 < lam < 1.0):
        raise ParameterError(f"classical domination needs 0 < lambda < 1, got {lam!r}", field="lambda")
    params = GdsParams(S=S, lam=lam, k_max=1, delta=delta)
    system, grid, pts, prof = _sweep(system, splitting, grid, [S], threads)
    a_s = prof[0]
    i = int(np.argmax(a_s))
    ok = a_s[i] <= math.log(lam) + COMPARE_TOL
    report = DominationReport(
        verdict="dominated" if ok else "not_dominated",
        worst_ratio_log=float(a_s[i]),
        worst_point=pts[i],
        params=params,
        grid=grid,
        evidence=EVIDENCE if ok else CONCLUSIVE,
        details={"points_evaluated": len(pts), "splitting": splitting.label},
    )
    if ok:
        j = _first(a_s <= -math.log(lam) - delta)
        report.witness_x0 = pts[j]
        report.witness_log_ratio = float(a_s[j])
    return report


def _growth_rate(values, S):
    k = np.arange(1, len(values) + 1) * S
    if len(values) < 2:
        return float(values[0] / S)
    return float(np.polyfit(k, values, 1)[0])


def check_gds(system, splitting, params: GdsParams = None, grid=None, threads=1) -> DominationReport:
    """Classify a splitting against the three generalized-domination conditions.

    Condition (1) is structural (see ``SplittingSpec.continuity_evidence``).
    Condition (2): max over the grid and k = 1..k_max of a_{kS} must stay at
    most ln(lambda).  Condition (3): the lexicographically first grid point
    with a_S(x0) <= -ln(lambda) - delta is the witness.  A GDS is reported
    ``dominated`` when a_S < 0 uniformly by at least delta, i.e. when the
    classical check passes for lambda' = exp(-delta) (and hence for the whole
    scanned range lambda' in (0, exp(-delta)] it is monotone over).
    """
    params = params or GdsParams()
    S, lam = int(params.S), float(params.lam)
    steps = [k * S for k in range(1, params.k_max + 1)]
    system, grid, pts, prof = _sweep(system, splitting, grid, steps, threads)
    log_lam = math.log(lam)

    per_point = prof.max(axis=0)
    i = int(np.argmax(per_point))
    worst = float(per_point[i])
    k_worst = int(np.argmax(prof[:, i])) + 1
    cond2 = worst <= log_lam + COMPARE_TOL

    a_s = prof[0]
    j = _first(a_s <= -log_lam - params.delta)
    best = int(np.argmin(a_s))
    max_one_step = float(np.max(a_s))
    dominated = max_one_step <= -params.delta + COMPARE_TOL

    details = {
        "splitting": splitting.label,
        "points_evaluated": len(pts),
        "condition1": splitting.continuity_evidence(grid),
        "condition2_holds": bool(cond2),
        "condition2_worst_k": k_worst,
        "condition3_witness_found": j is not None,
        "best_witness": pts[best],
        "best_witness_log_ratio": float(a_s[best]),
        "max_one_step_log_ratio": max_one_step,
    }
    if not cond2:
        first_bad = int(np.argmax(prof[:, i] > log_lam + COMPARE_TOL)) + 1
        details["condition2_first_violation_k"] = first_bad
        details["violation_profile"] = prof[:, i]
        details["violation_growth_rate_per_step"] = _growth_rate(prof[:, i], S)
        verdict = "not_gds"
    elif j is None:
        verdict = "conditions12_only"
    else:
        verdict = "dominated" if dominated else "gds_not_dominated"
    if dominated and cond2:
        details["dominated_lambda"] = math.exp(max_one_step)

    report = DominationReport(
        verdict=verdict,
        worst_ratio_log=worst,
        worst_point=pts[i],
        params=params,
        grid=grid,
        evidence=CONCLUSIVE if verdict == "not_gds" else EVIDENCE,
        details=details,
    )
    if verdict in ("dominated", "gds_not_dominated"):
        report.witness_x0 = pts[j]
        report.witness_log_ratio = float(a_s[j])
    return report


@dataclass
class UniformNegativityResult:
    """Outcome of the search for N with a_N < 0 everywhere on the grid.

    ``N`` and ``tau`` are None when no such N <= N_max exists on the grid.
    ``max_a`` holds max_x a_n(x) for n = 1..N_max.
    """

    N: Optional[int]
    tau: Optional[float]
    N_max: int
    max_a: np.ndarray
    worst_points: np.ndarray
    grid: GridSpec

    @property
    def found(self):
        return self.N is not None

    def to_dict(self):
        return {
            "N": self.N,
            "tau": self.tau,
            "N_max": self.N_max,
            "found": self.found,
            "max_a_last": float(self.max_a[-1]),
            "max_a_first": float(self.max_a[0]),
            "worst_point_at_N_max": self.worst_points[-1].tolist(),
            "grid": self.grid.describe(),
            "evidence": EVIDENCE if self.found else "no uniformly negative a_N on grid up to N_max",
        }


def uniform_negativity_search(system, splitting, grid=None, N_max=200, threshold=-1e-9, threads=1):
    """Smallest N <= N_max with max over the grid of a_N(x) < threshold.

    When found, tau = exp(max_x a_N(x)) < 1 and the splitting is
    (N, tau)-dominated on the grid.
    """
    if int(N_max) < 1:
        raise ParameterError("N_max must be >= 1", field="N_max")
    steps = list(range(1, int(N_max) + 1))
    system, grid, pts, prof = _sweep(system, splitting, grid, steps, threads)
    idx = np.argmax(prof, axis=1)
    max_a = prof[np.arange(len(steps)), idx]
    hit = _first(max_a < threshold)
    N = None if hit is None else hit + 1
    tau = None if hit is None else math.exp(float(max_a[hit]))
    return UniformNegativityResult(N=N, tau=tau, N_max=int(N_max), max_a=max_a, worst_points=pts[idx], grid=grid)


@dataclass
class AsymptoticBoundReport:
    passed: bool
    C: float
    C_source: str
    schedule: np.ndarray
    limit_slope: float
    worst_margin: float
    worst_sample: np.ndarray
    normalized: np.ndarray

    def to_dict(self):
        return {
            "passed": self.passed,
            "C": self.C,
            "C_source": self.C_source,
            "limit_slope": self.limit_slope,
            "worst_margin": self.worst_margin,
            "worst_sample": self.worst_sample.tolist(),
            "schedule": self.schedule.tolist(),
        }


def asymptotic_ratio_bound_check(system, splitting, params: GdsParams, samples, schedule=None,
                                 C=None, grid=None, tol=1e-9) -> AsymptoticBoundReport:
    """Check a_n(x)/n <= min(ln lambda, 0)/S + slack(n) along a schedule of n.

    Given condition (2), a_n(x) differs from a_{floor(n/S) S}(x) by at most
    2 S ln C, and a_{kS} <= ln(lambda) (or <= k ln(lambda) when lambda < 1), so

        a_n(x) <= n min(ln lambda, 0) / S + 2 S ln C + |ln lambda|.

    ``C`` defaults to the closed-form bound of the system; pass ``C="grid"``
    to use the grid estimate instead (reported in ``C_source``).
    """
    system = as_system(system)
    S, lam = int(params.S), float(params.lam)
    if C is None:
        C, source = system.sup_norm_bound(), "closed form"
    elif C == "grid":
        C, source = sandwich_constant(system, grid), "grid estimate (lower bound for the sup)"
    else:
        C, source = float(C), "given"
    if schedule is None:
        schedule = np.unique(np.geomspace(1, 1000, 25).astype(int))
    schedule = np.asarray(sorted(set(int(n) for n in schedule)))
    if schedule[0] < 1:
        raise ParameterError("schedule entries must be >= 1", field="schedule")
    samples = reduce_mod1(np.atleast_2d(np.asarray(samples, dtype=float)))
    prof = a_profile(system, splitting, samples, schedule)
    slope = min(math.log(lam), 0.0) / S
    n = schedule[:, None].astype(float)
    bound = n * slope + 2 * S * math.log(C) + abs(math.log(lam))
    margin = bound - prof
    w = np.unravel_index(np.argmin(margin), margin.shape)
    return AsymptoticBoundReport(
        passed=bool(np.all(margin >= -tol)),
        C=float(C),
        C_source=source,
        schedule=schedule,
        limit_slope=slope,
        worst_margin=float(margin[w]),
        worst_sample=samples[w[1]],
        normalized=prof / n,
    )
