"""Orbit averages behind the non-minimality argument.

Visits of the S-step orbit to the open set

    A_eps = {z : ||Df^S|E(z)|| / m(Df^S|F(z)) < 1/lambda - eps},

their frequency chi*, the bound c_{t_i}(x) <= i ln(1 - eps lambda) at the
visit times, and averages of a_n against empirical measures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..cocycle import a_profile
from ..errors import ParameterError
from ..systems import as_system, reduce_mod1

BOUND_TOL = 1e-6


def _check_eps(lam, eps):
    if not (lam > 0 and eps > 0):
        raise ParameterError("need lambda > 0 and epsilon > 0", field="epsilon")
    if 1.0 / lam - eps <= 0:
        raise ParameterError(f"epsilon={eps!r} >= 1/lambda={1.0 / lam!r} leaves A_eps undefined", field="epsilon")


def a_epsilon_membership(system, splitting, S, lam, eps, x):
    """True where exp(a_S(x)) < 1/lambda - eps.  Accepts one point or a batch."""
    _check_eps(lam, eps)
    x = np.asarray(x, dtype=float)
    a_s = a_profile(system, splitting, np.atleast_2d(x), [S])[0]
    inside = np.exp(a_s) < 1.0 / lam - eps
    return bool(inside[0]) if x.ndim == 1 else inside


def s_step_orbit(system, x, S, n):
    """Points f^{jS}(x) for j = 0..n-1, shape (n, d)."""
    system = as_system(system)
    out = np.empty((n, system.d))
    cur = reduce_mod1(np.asarray(x, dtype=float))[None, :]
    for j in range(n):
        out[j] = cur[0]
        for _ in range(S):
            cur = system.map_batch(cur)
    return out


@dataclass
class RecurrenceRecord:
    """Visit times t_0 < t_1 < ... of the S-step orbit to A_eps.

    ``chi_star`` is the visit frequency over the first ``n_max`` S-steps.
    ``times`` lists every visiting j in [0, n_max); the proof's convention
    t_0 = 0 holds exactly when the starting point lies in A_eps.
    """

    epsilon: float
    S: int
    lam: float
    times: np.ndarray
    chi_star: float
    n_max: int
    x: np.ndarray

    @property
    def starts_in_set(self):
        return len(self.times) > 0 and self.times[0] == 0

    @property
    def ratio_estimate(self):
        """i / t_i at the last visit (the proof's estimate of chi*)."""
        if len(self.times) < 2:
            return 0.0
        return (len(self.times) - 1) / float(self.times[-1])

    def to_dict(self):
        return {
            "epsilon": self.epsilon,
            "S": self.S,
            "lambda": self.lam,
            "n_max": self.n_max,
            "x": self.x.tolist(),
            "visits": int(len(self.times)),
            "first_times": self.times[:20].tolist(),
            "chi_star": self.chi_star,
            "ratio_estimate": self.ratio_estimate,
            "starts_in_set": self.starts_in_set,
        }


def recurrence_analysis(system, splitting, S, lam, eps, x, n_max) -> RecurrenceRecord:
    """Record the S-step times j < n_max at which f^{jS}(x) lies in A_eps."""
    _check_eps(lam, eps)
    if int(n_max) < 1:
        raise ParameterError("n_max must be >= 1", field="n_max")
    x = reduce_mod1(np.asarray(x, dtype=float))
    pts = s_step_orbit(system, x, int(S), int(n_max))
    a_s = a_profile(system, splitting, pts, [S])[0]
    times = np.flatnonzero(np.exp(a_s) < 1.0 / lam - eps)
    return RecurrenceRecord(
        epsilon=float(eps), S=int(S), lam=float(lam), times=times,
        chi_star=len(times) / float(n_max), n_max=int(n_max), x=x,
    )


@dataclass
class ProofBoundReport:
    hypothesis_met: bool
    reason: str
    record: RecurrenceRecord
    visit_index: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    visit_times: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    c_values: np.ndarray = field(default_factory=lambda: np.zeros(0))
    bounds: np.ndarray = field(default_factory=lambda: np.zeros(0))
    passed: bool = False
    final_slope: float = float("nan")
    predicted_slope: float = float("nan")

    @property
    def margins(self):
        return self.bounds - self.c_values

    def trace_rows(self):
        """Rows (i, t_i, c_{t_i}, i ln(1 - eps lambda))."""
        return [(int(i), int(t), float(c), float(b))
                for i, t, c, b in zip(self.visit_index, self.visit_times, self.c_values, self.bounds)]

    def to_dict(self):
        out = {
            "hypothesis_met": self.hypothesis_met,
            "reason": self.reason,
            "passed": self.passed,
            "recurrence": self.record.to_dict(),
        }
        if self.hypothesis_met:
            out.update({
                "visits_checked": int(len(self.visit_times)),
                "min_margin": float(np.min(self.margins)),
                "final_slope": self.final_slope,
                "predicted_slope": self.predicted_slope,
            })
        return out


def proof_bound_check(system, splitting, S, lam, eps, x, n_max, tol=BOUND_TOL) -> ProofBoundReport:
    """Verify c_{t_i}(x) = a_{t_i S}(x) <= i ln(1 - eps lambda) at every visit time.

    Also compares c_n(x)/n at n = n_max with chi* ln(1 - eps lambda), the
    limit the bound forces.  The chain of estimates starts at a visit, so the
    hypothesis is that x itself lies in A_eps (t_0 = 0) and revisits it.
    """
    if eps * lam >= 1.0:
        raise ParameterError(f"epsilon*lambda = {eps * lam!r} must be < 1", field="epsilon")
    rec = recurrence_analysis(system, splitting, S, lam, eps, x, n_max)
    if not rec.starts_in_set:
        return ProofBoundReport(False, "hypothesis not met: x is not in A_eps", rec)
    if len(rec.times) < 2:
        return ProofBoundReport(False, "hypothesis not met: no return to A_eps within n_max", rec)
    idx = np.arange(len(rec.times))
    steps = list(rec.times * S) + [int(n_max) * S]
    prof = a_profile(system, splitting, rec.x[None, :], steps)[:, 0]
    c = prof[:-1]
    log_rate = math.log(1.0 - eps * lam)
    bounds = idx * log_rate
    return ProofBoundReport(
        hypothesis_met=True,
        reason="x in A_eps with returns",
        record=rec,
        visit_index=idx,
        visit_times=rec.times,
        c_values=c,
        bounds=bounds,
        passed=bool(np.all(c <= bounds + tol)),
        final_slope=float(prof[-1] / n_max),
        predicted_slope=rec.chi_star * log_rate,
    )


# ---------------------------------------------------------------------------
# empirical measures


@dataclass
class EmpiricalMeasure:
    """Weighted point sample standing in for an invariant measure."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = reduce_mod1(np.atleast_2d(np.asarray(self.points, dtype=float)))
        w = np.asarray(self.weights, dtype=float).ravel()
        if len(w) != len(pts) or len(w) == 0:
            raise ParameterError("need one weight per sample point", field="mu")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ParameterError("weights must be nonnegative and sum to 1", field="mu.weights")
        self.points, self.weights = pts, w

    @classmethod
    def uniform(cls, points):
        pts = np.atleast_2d(points)
        return cls(pts, np.full(len(pts), 1.0 / len(pts)))

    @classmethod
    def dirac(cls, x):
        return cls(np.atleast_2d(x), np.ones(1))

    @classmethod
    def orbit_average(cls, system, x, n):
        """Uniform weights on x, f(x), ..., f^{n-1}(x)."""
        return cls.uniform(s_step_orbit(system, x, 1, n))

    @classmethod
    def fiber_product(cls, fixed, free_axes, n_samples, seed=0):
        """Points with ``fixed`` coordinates and uniform random ``free_axes``.

        E.g. delta_0 x Lebesgue on T^3 is ``fiber_product([0, 0, 0], [1, 2], n)``.
        """
        rng = np.random.default_rng(seed)
        pts = np.tile(np.asarray(fixed, dtype=float), (int(n_samples), 1))
        pts[:, list(free_axes)] = rng.random((int(n_samples), len(free_axes)))
        return cls.uniform(pts)


def measure_average_profile(system, splitting, mu: EmpiricalMeasure, n_schedule):
    """(1/n) sum_j w_j a_n(x_j) for each n in the schedule."""
    sched = [int(n) for n in n_schedule]
    if not sched:
        raise ParameterError("schedule must be nonempty", field="n_schedule")
    if min(sched) < 1:
        raise ParameterError("schedule entries must be >= 1", field="n_schedule")
    order = sorted(set(sched))
    prof = a_profile(system, splitting, mu.points, order)
    means = prof @ mu.weights / np.asarray(order, dtype=float)
    lookup = dict(zip(order, means))
    return np.array([lookup[n] for n in sched])


def measure_average_inf(system, splitting, mu: EmpiricalMeasure, n_schedule) -> float:
    """min over the schedule of (1/n) int a_n dmu; negative supports the
    hypothesis that forces uniform negativity of some a_N."""
    return float(np.min(measure_average_profile(system, splitting, mu, n_schedule)))


def liminf_probe(system, splitting, x, n_max, window) -> float:
    """min of a_n(x)/n over n in [n_max - window, n_max] (n >= 1)."""
    n_max, window = int(n_max), int(window)
    if not (n_max >= window >= 1):
        raise ParameterError("need n_max >= window >= 1", field="window")
    ns = np.arange(max(1, n_max - window), n_max + 1)
    x = reduce_mod1(np.asarray(x, dtype=float))
    prof = a_profile(system, splitting, x[None, :], ns)[:, 0]
    return float(np.min(prof / ns))


def convergence_trace(system, splitting, x, ns):
    """Rows (n, a_n(x)/n) for plotting convergence of the log-ratio slope."""
    ns = [int(n) for n in ns if int(n) >= 1]
    x = reduce_mod1(np.asarray(x, dtype=float))
    prof = a_profile(system, splitting, x[None, :], ns)[:, 0]
    return [(n, float(a / n)) for n, a in zip(ns, prof)]
