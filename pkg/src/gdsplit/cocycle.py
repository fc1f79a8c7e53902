"""Overflow-safe derivative cocycles restricted to subbundles.

For a splitting with frames B_E(x), the restriction Df(x)|E(x) is written
in adapted orthonormal coordinates as the small matrix

    M_E(x) = B_E(f x)^T Df(x) B_E(x),

so that Df^n|E(x) has the singular values of M_E(f^{n-1} x) ... M_E(x).
Re-anchoring on the frame at every orbit point keeps a stable direction
from being swamped by rounding errors that the unstable direction would
otherwise amplify.  Products are held as :class:`ScaledMatrix` values
(unit-scale body plus a log-scale), and the smallest singular value comes
from a separately accumulated product of inverses so that it is computed
as a dominant quantity too.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import InvalidBasisError, NumericError, ParameterError, SingularRestrictionError
from .grids import GridSpec
from .splittings import ORTHONORMAL_TOL, check_orthonormal
from .systems import as_system, reduce_mod1

SINGULAR_TOL = 1e-300


@dataclass
class ScaledMatrix:
    """exp(log_scale) * body, batched over leading axes.

    After :meth:`normalized` the largest column norm of each body is 1, so
    every body stays inside [1/2, 2] however large the product grows.
    """

    body: np.ndarray
    log_scale: np.ndarray

    @classmethod
    def identity(cls, batch, r):
        return cls(np.broadcast_to(np.eye(r), (batch, r, r)).copy(), np.zeros(batch))

    def normalized(self, step=None):
        norms = np.max(np.linalg.norm(self.body, axis=-2), axis=-1)
        if not np.all(np.isfinite(norms)) or np.any(norms <= 0.0):
            bad = int(np.flatnonzero(~(np.isfinite(norms) & (norms > 0.0)))[0])
            raise NumericError("cocycle product degenerated", step=step, point=bad)
        return ScaledMatrix(self.body / norms[:, None, None], self.log_scale + np.log(norms))

    def left_multiply(self, a, step=None):
        return ScaledMatrix(a @ self.body, self.log_scale).normalized(step)

    def right_multiply(self, a, step=None):
        return ScaledMatrix(self.body @ a, self.log_scale).normalized(step)

    def log_max_singular_value(self):
        s = np.linalg.svd(self.body, compute_uv=False)[..., 0]
        return self.log_scale + np.log(s)

    def to_array(self):
        """The represented matrix; may overflow for long products."""
        return np.exp(self.log_scale)[:, None, None] * self.body


@dataclass
class RestrictedNormPair:
    """ln ||Df^n|E(x)|| and ln m(Df^n|F(x))."""

    log_norm_E: float
    log_conorm_F: float
    n: int
    x: np.ndarray

    @property
    def log_ratio(self):
        return self.log_norm_E - self.log_conorm_F


@dataclass
class SubadditiveSequenceSample:
    """a_n(x) for n = 1..n_max and b_k(x) for k = 1..n_max."""

    a_values: np.ndarray
    b_values: np.ndarray
    x: np.ndarray


# ---------------------------------------------------------------------------
# single-matrix norms


def _check_matrix(a):
    a = np.asarray(a, dtype=float)
    if not np.all(np.isfinite(a)):
        raise NumericError("matrix has non-finite entries", operation="restricted_norm")
    return a


def _restricted(a, basis):
    a = _check_matrix(a)
    basis = np.asarray(basis, dtype=float)
    if basis.ndim == 1:
        basis = basis[:, None]
    if not np.all(np.isfinite(basis)):
        raise NumericError("basis has non-finite entries")
    check_orthonormal(basis, ORTHONORMAL_TOL)
    if a.shape[-1] != basis.shape[0]:
        raise InvalidBasisError(f"basis has {basis.shape[0]} rows but the matrix acts on R^{a.shape[-1]}")
    return np.linalg.svd(a @ basis, compute_uv=False)


def restricted_norm(a, basis) -> float:
    """||A|_span(basis)||: the largest singular value of A @ basis."""
    return float(_restricted(a, basis)[0])


def restricted_conorm(a, basis) -> float:
    """m(A|_span(basis)): the smallest singular value of A @ basis.

    Raises:
        SingularRestrictionError: the restriction has lost rank.
    """
    s = _restricted(a, basis)
    if s[-1] < SINGULAR_TOL:
        raise SingularRestrictionError(f"restriction is singular (smallest singular value {s[-1]:.3e})")
    return float(s[-1])


# ---------------------------------------------------------------------------
# batched cocycle runs


class _BundleProduct:
    """Accumulates Df^n restricted to one bundle, for a batch of points."""

    def __init__(self, batch, r):
        self.r = r
        self.forward = ScaledMatrix.identity(batch, r)
        self.backward = ScaledMatrix.identity(batch, r) if r > 1 else None

    def push(self, m, step, pts):
        if self.r == 1:
            mag = np.abs(m[:, 0, 0])
            if np.any(~(mag >= SINGULAR_TOL)) or np.any(~np.isfinite(mag)):
                bad = int(np.flatnonzero(~((mag >= SINGULAR_TOL) & np.isfinite(mag)))[0])
                raise SingularRestrictionError("restricted Jacobian is singular", step=step, point=pts[bad])
            self.forward = ScaledMatrix(self.forward.body, self.forward.log_scale + np.log(mag))
            return
        det = np.linalg.det(m)
        ok = np.isfinite(det) & (np.abs(det) > 0.0)
        if ok.all():
            with np.errstate(all="ignore"):
                inv = np.linalg.inv(m)
            ok = np.all(np.isfinite(inv), axis=(-2, -1))
        if not ok.all():
            bad = int(np.flatnonzero(~ok)[0])
            raise SingularRestrictionError("restricted Jacobian is singular", step=step, point=pts[bad])
        self.forward = self.forward.left_multiply(m, step)
        self.backward = self.backward.right_multiply(inv, step)

    def log_extremes(self):
        """(ln sigma_max, ln sigma_min) of the accumulated product."""
        if self.r == 1:
            return self.forward.log_scale.copy(), self.forward.log_scale.copy()
        return self.forward.log_max_singular_value(), -self.backward.log_max_singular_value()


def _run_chunk(system, splitting, pts, steps, last):
    n_pts = pts.shape[0]
    rec = {key: np.zeros((len(steps), n_pts)) for key in ("maxE", "minE", "maxF", "minF")}
    slot = {s: i for i, s in enumerate(steps)}
    E = _BundleProduct(n_pts, splitting.dim_E)
    F = _BundleProduct(n_pts, splitting.dim_F)
    x = pts
    bE, bF = splitting.frame_E(x), splitting.frame_F(x)
    # constant frames only need the coordinates the Jacobian depends on
    advance = system.map_varying_batch if splitting.constant else system.map_batch
    for step in range(1, last + 1):
        jac = system.jacobian_batch(x)
        y = advance(x)
        bE_next, bF_next = splitting.frame_E(y), splitting.frame_F(y)
        mE = np.swapaxes(bE_next, -1, -2) @ (jac @ bE)
        mF = np.swapaxes(bF_next, -1, -2) @ (jac @ bF)
        E.push(mE, step, x)
        F.push(mF, step, x)
        if step in slot:
            i = slot[step]
            rec["maxE"][i], rec["minE"][i] = E.log_extremes()
            rec["maxF"][i], rec["minF"][i] = F.log_extremes()
        x, bE, bF = y, bE_next, bF_next
    return rec


def restricted_log_singular_values(system, splitting, points, steps, threads=1):
    """Extreme log singular values of Df^n|E and Df^n|F for each step n.

    Args:
        points: array ``(N, d)``.
        steps: nondecreasing iterable of step counts n >= 0.
        threads: split the batch across this many worker threads; results
            are identical for every worker count.

    Returns:
        dict with arrays ``maxE, minE, maxF, minF`` of shape ``(len(steps), N)``.
    """
    system = as_system(system)
    pts = reduce_mod1(np.atleast_2d(np.asarray(points, dtype=float)))
    steps = [int(s) for s in steps]
    if any(s < 0 for s in steps):
        raise ParameterError("step counts must be >= 0", field="n")
    if splitting.d != system.d:
        raise ParameterError(f"splitting lives in dimension {splitting.d}, system in {system.d}")
    last = max(steps, default=0)
    threads = max(1, int(threads))
    if threads == 1 or len(pts) < 2 * threads:
        return _run_chunk(system, splitting, pts, steps, last)
    chunks = np.array_split(pts, threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda c: _run_chunk(system, splitting, c, steps, last), chunks))
    return {k: np.concatenate([p[k] for p in parts], axis=1) for k in parts[0]}


def a_profile(system, splitting, points, steps, threads=1):
    """a_n(x) = ln ||Df^n|E(x)|| - ln m(Df^n|F(x)), shape ``(len(steps), N)``."""
    rec = restricted_log_singular_values(system, splitting, points, steps, threads)
    return rec["maxE"] - rec["minF"]


def b_profile(system, splitting, points, steps, threads=1):
    """b_k(x) = ln ||(Df^k|E)^-1|| - ln m((Df^k|F)^-1) = -ln m(Df^k|E) + ln ||Df^k|F||."""
    rec = restricted_log_singular_values(system, splitting, points, steps, threads)
    return rec["maxF"] - rec["minE"]


def cocycle_restricted(system, splitting, x, n) -> RestrictedNormPair:
    """ln ||Df^n|E(x)|| and ln m(Df^n|F(x)) at one point."""
    if n < 0:
        raise ParameterError("n must be >= 0", field="n")
    x = reduce_mod1(np.asarray(x, dtype=float))
    rec = restricted_log_singular_values(system, splitting, x[None, :], [n])
    return RestrictedNormPair(float(rec["maxE"][0, 0]), float(rec["minF"][0, 0]), int(n), x)


def _single_or_batch(fn, system, splitting, x, n, name):
    if n < 1:
        raise ParameterError(f"{name} needs n >= 1", field="n")
    x = np.asarray(x, dtype=float)
    out = fn(system, splitting, np.atleast_2d(x), [n])[0]
    return float(out[0]) if x.ndim == 1 else out


def a_n(system, splitting, x, n):
    """a_n(x) for one point (float) or a batch of points (array)."""
    return _single_or_batch(a_profile, system, splitting, x, n, "a_n")


def b_k(system, splitting, x, k):
    """b_k(x) for one point (float) or a batch of points (array)."""
    return _single_or_batch(b_profile, system, splitting, x, k, "b_k")


def subadditive_sample(system, splitting, x, n_max) -> SubadditiveSequenceSample:
    x = reduce_mod1(np.asarray(x, dtype=float))
    steps = range(1, int(n_max) + 1)
    rec = restricted_log_singular_values(system, splitting, x[None, :], steps)
    return SubadditiveSequenceSample(
        a_values=(rec["maxE"] - rec["minF"])[:, 0],
        b_values=(rec["maxF"] - rec["minE"])[:, 0],
        x=x,
    )


def sandwich_constant(system, grid: GridSpec = None) -> float:
    """Grid estimate of C = sup_x max(||Df(x)||, ||Df(x)^-1||).

    A maximum over finitely many points is only a lower bound for the sup;
    ``system.sup_norm_bound()`` gives the closed form for built-in systems.
    """
    system = as_system(system)
    grid = grid or GridSpec.default(system)
    pts = grid.evaluation_points(system, collapse=True)
    if len(pts) == 0:
        raise ParameterError("grid is empty", field="grid")
    fwd = np.linalg.svd(system.jacobian_batch(pts), compute_uv=False)[:, 0]
    inv = np.linalg.svd(system.jacobian_inverse_batch(pts), compute_uv=False)[:, 0]
    return float(max(np.max(fwd), np.max(inv)))
