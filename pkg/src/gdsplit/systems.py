"""Smooth self-maps of tori with exact Jacobians.

Every map here is a product of factors acting on disjoint blocks of
coordinates.  Points are numpy arrays: a single point has shape ``(d,)``
and a batch has shape ``(N, d)``.  Coordinates always live in ``[0, 1)``.

Factors:
  * :class:`CircleMapG` -- an increasing circle diffeomorphism fixing 0 and
    1/2, with derivative ``alpha`` at 0 and ``beta`` at 1/2.
  * :class:`ToralAutomorphism` -- ``y -> A y (mod 1)`` for an integer matrix
    with ``|det A| = 1``.
  * :class:`RotationSystem` -- ``y -> y + a (mod 1)``.

:class:`ProductSystem` glues factors together and is the general torus map
consumed by the cocycle engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np
from scipy.special import gammaln

from .errors import DimensionError, InfeasibleProfileError, ParameterError

GOLDEN_STABLE = (3.0 - math.sqrt(5.0)) / 2.0
GOLDEN_UNSTABLE = (3.0 + math.sqrt(5.0)) / 2.0
CAT_MATRIX = ((2, 1), (1, 1))

MINIMALITY_FLAGS = ("known-minimal", "known-non-minimal", "unknown")


def reduce_mod1(coords):
    """Reduce coordinates into [0, 1); an exact 1.0 (or rounding up to it) maps to 0.0."""
    r = np.mod(np.asarray(coords, dtype=float), 1.0)
    r[r >= 1.0] = 0.0
    return r


def torus_point(coords) -> np.ndarray:
    """Return a validated point of T^d as a float vector in [0, 1)."""
    x = np.atleast_1d(np.asarray(coords, dtype=float))
    if x.ndim != 1:
        raise DimensionError(f"a torus point is a vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ParameterError("torus point has non-finite coordinates")
    return reduce_mod1(x)


def _as_batch(x, dim):
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.shape[-1] != dim:
        raise DimensionError(f"expected points of dimension {dim}, got shape {np.shape(x)}")
    return pts, single


class Factor:
    """One block of a product map; subclasses implement the batch methods."""

    kind = "factor"
    dim = 0
    constant_jacobian = False

    def map_batch(self, pts):  # pragma: no cover - abstract
        raise NotImplementedError

    def jacobian_batch(self, pts):  # pragma: no cover - abstract
        raise NotImplementedError

    def jacobian_inverse_batch(self, pts):
        return np.linalg.inv(self.jacobian_batch(pts))

    def log_derivative_batch(self, pts):
        """ln |f'(x)| for one-dimensional factors, shape ``(N,)``."""
        if self.dim != 1:
            raise DimensionError(f"{self.kind} factor is {self.dim}-dimensional; log-derivative needs dim 1")
        return np.log(np.abs(self.jacobian_batch(pts)[:, 0, 0]))

    def sup_norm_bound(self) -> float:
        """Closed-form sup over the factor of max(||Df||, ||Df^-1||)."""
        raise NotImplementedError  # pragma: no cover

    def describe(self) -> str:  # pragma: no cover - overridden
        return self.kind

    # single-point conveniences
    def eval(self, x):
        pts, single = _as_batch(x, self.dim)
        out = self.map_batch(pts)
        return out[0] if single else out

    def jacobian(self, x):
        pts, single = _as_batch(x, self.dim)
        out = self.jacobian_batch(pts)
        return out[0] if single else out

    def jacobian_inverse(self, x):
        pts, single = _as_batch(x, self.dim)
        out = self.jacobian_inverse_batch(pts)
        return out[0] if single else out


# ---------------------------------------------------------------------------
# circle map g


def sin_power_mean(p: float) -> float:
    """Integral of sin(pi t)^(2p) over [0, 1], via the Beta-function identity."""
    return math.exp(gammaln(p + 0.5) - gammaln(p + 1.0) - 0.5 * math.log(math.pi))


def solve_bump_exponent(target: float, lo: float = 0.5, hi: float = 64.0, tol: float = 1e-12) -> float:
    """Bisect for p with ``sin_power_mean(p) == target``.

    The mean is strictly decreasing in p.  Bisection runs until the bracket
    stops shrinking in floating point, so the residual is far below ``tol``.
    """
    f_lo, f_hi = sin_power_mean(lo), sin_power_mean(hi)
    if not (f_hi <= target <= f_lo):
        raise InfeasibleProfileError(
            f"target mean {target!r} outside the reachable range [{f_hi:.6g}, {f_lo:.6g}] for p in [{lo}, {hi}]"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if sin_power_mean(mid) > target:
            lo = mid
        else:
            hi = mid
    p = 0.5 * (lo + hi)
    if abs(sin_power_mean(p) - target) > tol:  # pragma: no cover - bisection converges
        raise InfeasibleProfileError(f"bisection stalled at p={p}")
    return p


@dataclass(frozen=True, eq=False)
class CircleMapG(Factor):
    """Circle diffeomorphism with derivative ``alpha + (beta - alpha) sin(pi x)^(2p)``.

    ``g`` itself is a cumulative Simpson table of its derivative on
    ``table_resolution`` intervals, interpolated by cubic Hermite pieces that
    use the exact node derivatives.  The table is built on [0, 1/2], pinned
    so that g(1/2) = 1/2 exactly, and mirrored with g(1 - x) = 1 - g(x).

    Use :func:`build_circle_map_g` to construct one.
    """

    alpha: float
    beta: float
    p: float
    table_resolution: int
    table: np.ndarray = field(repr=False)
    node_slopes: np.ndarray = field(repr=False)

    kind = "circle_g"
    dim = 1
    constant_jacobian = False

    def derivative(self, x):
        s2 = np.sin(np.pi * np.asarray(x, dtype=float)) ** 2
        return self.alpha + (self.beta - self.alpha) * s2**self.p

    def g(self, x):
        """Evaluate g on points of [0, 1] (any array shape)."""
        x = np.asarray(x, dtype=float)
        m = self.table_resolution
        u = x.ravel() * m
        i = u.astype(np.int64)
        t = u - i
        c = np.take(self.coefficients, i, axis=0)
        return (((c[:, 3] * t + c[:, 2]) * t + c[:, 1]) * t + c[:, 0]).reshape(x.shape)

    @property
    def coefficients(self):
        """Per-interval cubic Hermite coefficients in the local variable t in [0, 1)."""
        coef = self.__dict__.get("_coef")
        if coef is None:
            h = 1.0 / self.table_resolution
            y0, y1 = self.table[:-1], self.table[1:]
            s0, s1 = h * self.node_slopes[:-1], h * self.node_slopes[1:]
            coef = np.stack([y0, s0, 3 * (y1 - y0) - 2 * s0 - s1, 2 * (y0 - y1) + s0 + s1], axis=-1)
            # extra row so that x = 1.0 evaluates to g(1) = 1 without clamping
            coef = np.vstack([coef, [1.0, 0.0, 0.0, 0.0]])
            coef.setflags(write=False)
            object.__setattr__(self, "_coef", coef)
        return coef

    def map_batch(self, pts):
        y = self.g(pts)
        y[y >= 1.0] = 0.0  # g maps [0, 1) into [0, 1]
        return y

    def jacobian_batch(self, pts):
        return self.derivative(pts[:, :1])[:, :, None]

    def jacobian_inverse_batch(self, pts):
        return 1.0 / self.jacobian_batch(pts)

    def log_derivative_batch(self, pts):
        return np.log(self.derivative(pts[:, 0]))

    def sup_norm_bound(self):
        return max(self.beta, 1.0 / self.alpha, 1.0 / self.beta, self.alpha)

    @property
    def smoothness(self) -> str:
        """Differentiability class actually achieved by this profile."""
        two_p = 2.0 * self.p
        if float(self.p).is_integer():
            return "C^inf"
        if two_p.is_integer():
            return f"C^{int(two_p)}"
        return f"C^{int(math.floor(two_p)) + 1}"

    def describe(self):
        return f"circle_g(alpha={self.alpha!r}, beta={self.beta!r})"


def build_circle_map_g(alpha: float = GOLDEN_STABLE, beta: float = GOLDEN_UNSTABLE,
                       table_resolution: int = 2**16) -> CircleMapG:
    """Construct the circle map g with g'(0) = alpha and g'(1/2) = beta.

    The bump exponent p is chosen so that the derivative integrates to one,
    i.e. ``mean(sin^(2p)) = (1 - alpha) / (beta - alpha)``.

    Raises:
        InfeasibleProfileError: the target mean is 0/0, outside (0, 1), or
            not reachable with p in [0.5, 64].
    """
    alpha = float(alpha)
    beta = float(beta)
    if not (beta - alpha) or not math.isfinite(alpha) or not math.isfinite(beta):
        raise InfeasibleProfileError(f"alpha={alpha!r}, beta={beta!r} give an undefined target mean")
    target = (1.0 - alpha) / (beta - alpha)
    if not (0.0 < alpha < 1.0 < beta) or not (0.0 < target < 1.0):
        raise InfeasibleProfileError(
            f"need 0 < alpha < 1 < beta, got alpha={alpha!r}, beta={beta!r} (target mean {target!r})"
        )
    m = int(table_resolution)
    if m < 4 or m % 2:
        raise ParameterError("table_resolution must be an even integer >= 4", field="table_resolution")
    p = solve_bump_exponent(target)

    half = m // 2
    h = 1.0 / m
    nodes = np.arange(half + 1) * h

    def gp(x):
        return alpha + (beta - alpha) * (np.sin(np.pi * x) ** 2) ** p

    pieces = h / 6.0 * (gp(nodes[:-1]) + 4.0 * gp(nodes[:-1] + 0.5 * h) + gp(nodes[1:]))
    left = np.concatenate(([0.0], np.cumsum(pieces)))
    left *= 0.5 / left[-1]
    left[-1] = 0.5
    table = np.concatenate((left, 1.0 - left[-2::-1]))
    table[-1] = 1.0
    table.setflags(write=False)
    slopes = gp(np.arange(m + 1) * h)
    slopes.setflags(write=False)
    return CircleMapG(alpha=alpha, beta=beta, p=p, table_resolution=m, table=table, node_slopes=slopes)


# ---------------------------------------------------------------------------
# toral automorphisms


def _integer_det(a: np.ndarray) -> int:
    # Bareiss fraction-free elimination keeps everything in exact integers.
    m = [[int(v) for v in row] for row in a]
    n = len(m)
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _canonical_sign(v):
    idx = np.flatnonzero(np.abs(v) > 1e-14)
    if idx.size and v[idx[0]] < 0:
        return -v
    return v


@dataclass(frozen=True, eq=False)
class ToralAutomorphism(Factor):
    """Linear automorphism ``y -> A y (mod 1)`` of T^k.

    For 2x2 matrices the eigenvalues and unit eigenvectors come from the
    characteristic polynomial in closed form.  ``stable_frame`` and
    ``unstable_frame`` are orthonormal bases of the contracting and expanding
    eigenspaces.
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray = field(repr=False)
    eigenvectors: np.ndarray = field(repr=False)

    kind = "toral"
    constant_jacobian = True

    @property
    def dim(self):
        return self.matrix.shape[0]

    def map_batch(self, pts):
        return reduce_mod1(pts @ self.matrix.T)

    def jacobian_batch(self, pts):
        return np.broadcast_to(self.matrix.astype(float), (pts.shape[0], self.dim, self.dim))

    def jacobian_inverse_batch(self, pts):
        return np.broadcast_to(self.inverse, (pts.shape[0], self.dim, self.dim))

    @property
    def inverse(self):
        return np.linalg.inv(self.matrix.astype(float))

    def _frame(self, mask, name):
        if not mask.any():
            raise ParameterError(f"toral automorphism {self.matrix.tolist()} has no {name} eigen-directions")
        vecs = self.eigenvectors[:, mask]
        if vecs.shape[1] == 1:
            return vecs.copy()
        q, _ = np.linalg.qr(vecs)
        return q

    @property
    def stable_frame(self):
        return self._frame(np.abs(self.eigenvalues) < 1.0, "stable")

    @property
    def unstable_frame(self):
        return self._frame(np.abs(self.eigenvalues) > 1.0, "unstable")

    @property
    def stable_eigenvalues(self):
        return self.eigenvalues[np.abs(self.eigenvalues) < 1.0]

    @property
    def unstable_eigenvalues(self):
        return self.eigenvalues[np.abs(self.eigenvalues) > 1.0]

    def sup_norm_bound(self):
        s = np.linalg.svd(self.matrix.astype(float), compute_uv=False)
        return float(max(s[0], 1.0 / s[-1]))

    def describe(self):
        rows = ", ".join(str(list(map(int, r))) for r in self.matrix)
        return f"toral({rows})"


def build_toral(matrix) -> ToralAutomorphism:
    """Validate an integer matrix with |det| = 1 and attach its eigen-data."""
    a = np.asarray(matrix)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionError(f"toral matrix must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a.astype(float))) or not np.array_equal(a, np.round(a)):
        raise ParameterError("toral matrix must have integer entries")
    a = np.round(a).astype(np.int64)
    det = _integer_det(a)
    if abs(det) != 1:
        raise ParameterError(f"toral matrix must have |det| = 1, got det = {det}")

    if a.shape == (2, 2):
        (p, q), (r, s) = a.tolist()
        tr = p + s
        disc = tr * tr - 4 * det
        if disc > 0:
            root = math.sqrt(disc)
            lams = sorted(((tr - root) / 2.0, (tr + root) / 2.0), key=abs)
            vecs = []
            for lam in lams:
                # pick the better conditioned of the two null-vector formulas
                v1 = np.array([q, lam - p], dtype=float)
                v2 = np.array([lam - s, r], dtype=float)
                v = v1 if np.linalg.norm(v1) >= np.linalg.norm(v2) else v2
                vecs.append(_canonical_sign(v / np.linalg.norm(v)))
            evals = np.array(lams)
            evecs = np.column_stack(vecs)
        else:
            # elliptic or parabolic: all eigenvalues on the unit circle, so no
            # stable/unstable frames; store moduli only
            evals = np.ones(2)
            evecs = np.eye(2)
    else:
        w, v = np.linalg.eig(a.astype(float))
        if np.any(np.abs(w.imag) > 1e-12):
            raise ParameterError("only toral matrices with real spectrum are supported beyond 2x2")
        order = np.argsort(np.abs(w.real))
        evals = w.real[order]
        evecs = np.column_stack([_canonical_sign(v.real[:, j] / np.linalg.norm(v.real[:, j])) for j in order])
    a.setflags(write=False)
    return ToralAutomorphism(matrix=a, eigenvalues=evals, eigenvectors=evecs)


# ---------------------------------------------------------------------------
# rotations


@dataclass(frozen=True, eq=False)
class RotationSystem(Factor):
    """Translation ``y -> y + a (mod 1)`` on T^n.

    Whether 1, a_1, ..., a_n are rationally independent is declared through
    ``minimality_flag``; it is never inferred from the floats.
    """

    frequencies: np.ndarray
    minimality_flag: str = "unknown"

    kind = "rotation"
    constant_jacobian = True

    def __post_init__(self):
        if self.minimality_flag not in MINIMALITY_FLAGS:
            raise ParameterError(f"minimality_flag must be one of {MINIMALITY_FLAGS}", field="minimality_flag")

    @property
    def dim(self):
        return self.frequencies.shape[0]

    def map_batch(self, pts):
        return reduce_mod1(pts + self.frequencies)

    def jacobian_batch(self, pts):
        return np.broadcast_to(np.eye(self.dim), (pts.shape[0], self.dim, self.dim))

    jacobian_inverse_batch = jacobian_batch

    def log_derivative_batch(self, pts):
        if self.dim != 1:
            return super().log_derivative_batch(pts)
        return np.zeros(pts.shape[0])

    def sup_norm_bound(self):
        return 1.0

    def describe(self):
        return "rotation(" + ", ".join(repr(float(a)) for a in self.frequencies) + ")"


def build_rotation(frequencies, minimality_flag="unknown") -> RotationSystem:
    a = np.atleast_1d(np.asarray(frequencies, dtype=float))
    if a.ndim != 1 or a.size == 0 or not np.all(np.isfinite(a)):
        raise ParameterError("rotation needs a nonempty vector of finite frequencies", field="frequencies")
    a = a.copy()
    a.setflags(write=False)
    return RotationSystem(frequencies=a, minimality_flag=minimality_flag)


# ---------------------------------------------------------------------------
# products


class ProductSystem:
    """Product of named factors; the Jacobian is block diagonal.

    Args:
        components: sequence of ``(name, factor)`` pairs, or bare factors
            (named ``f0``, ``f1``, ... by position).
    """

    def __init__(self, components: Sequence):
        named = []
        for i, item in enumerate(components):
            if isinstance(item, Factor):
                named.append((f"f{i}", item))
            else:
                name, fac = item
                if not isinstance(fac, Factor):
                    raise ParameterError(f"component {name!r} is not a factor")
                named.append((str(name), fac))
        if not named:
            raise ParameterError("a product needs at least one factor")
        names = [n for n, _ in named]
        if len(set(names)) != len(names):
            raise ParameterError(f"duplicate factor names in {names}")
        self.names = tuple(names)
        self.factors = tuple(f for _, f in named)
        offsets = np.cumsum([0] + [f.dim for f in self.factors])
        self.slices = tuple(slice(int(offsets[i]), int(offsets[i + 1])) for i in range(len(self.factors)))
        self.d = int(offsets[-1])

    def __repr__(self):
        return f"ProductSystem({self.describe()})"

    def describe(self) -> str:
        inner = ", ".join(f"{n}={f.describe()}" for n, f in zip(self.names, self.factors))
        return f"product({inner})"

    def factor_index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ParameterError(f"unknown factor {name!r}; known: {list(self.names)}") from None

    def factor(self, name: str) -> Factor:
        return self.factors[self.factor_index(name)]

    @property
    def varying_axes(self) -> np.ndarray:
        """Boolean mask of coordinates whose factor has a position-dependent Jacobian."""
        mask = np.zeros(self.d, dtype=bool)
        for fac, sl in zip(self.factors, self.slices):
            mask[sl] = not fac.constant_jacobian
        return mask

    def map_batch(self, pts):
        out = np.empty_like(pts)
        for fac, sl in zip(self.factors, self.slices):
            out[:, sl] = fac.map_batch(pts[:, sl])
        return out

    def map_varying_batch(self, pts):
        """Advance only the factors whose Jacobian depends on position.

        The other coordinates are left in place.  For a product map the
        Jacobian at f^n(x) is the same whichever way those coordinates are
        advanced, so this is enough to evaluate the derivative cocycle.
        """
        out = pts.copy()
        for fac, sl in zip(self.factors, self.slices):
            if not fac.constant_jacobian:
                out[:, sl] = fac.map_batch(pts[:, sl])
        return out

    def _block(self, pts, method):
        out = np.zeros((pts.shape[0], self.d, self.d))
        for fac, sl in zip(self.factors, self.slices):
            out[:, sl, sl] = getattr(fac, method)(pts[:, sl])
        return out

    def jacobian_batch(self, pts):
        return self._block(pts, "jacobian_batch")

    def jacobian_inverse_batch(self, pts):
        return self._block(pts, "jacobian_inverse_batch")

    def eval(self, x):
        """f(x), reduced mod 1; accepts one point or a batch."""
        pts, single = _as_batch(x, self.d)
        out = self.map_batch(pts)
        return out[0] if single else out

    def jacobian(self, x):
        pts, single = _as_batch(x, self.d)
        out = self.jacobian_batch(pts)
        return out[0] if single else out

    def jacobian_inverse(self, x):
        pts, single = _as_batch(x, self.d)
        out = self.jacobian_inverse_batch(pts)
        return out[0] if single else out

    def sup_norm_bound(self) -> float:
        """Closed-form C = sup_x max(||Df(x)||, ||Df(x)^-1||)."""
        return max(f.sup_norm_bound() for f in self.factors)


TorusMapSystem = ProductSystem


def as_system(obj) -> ProductSystem:
    """Wrap a bare factor as a one-factor product; products pass through."""
    if isinstance(obj, ProductSystem):
        return obj
    if isinstance(obj, Factor):
        return ProductSystem([("f0", obj)])
    raise ParameterError(f"not a torus map: {obj!r}")


def orbit(system, x, n: int) -> Iterator[np.ndarray]:
    """Yield x, f(x), ..., f^n(x) one point at a time."""
    if n < 0:
        raise ParameterError("orbit length must be >= 0", field="n")
    system = as_system(system)
    cur = np.asarray(x, dtype=float)
    pts, single = _as_batch(cur, system.d)
    pts = reduce_mod1(pts)
    yield pts[0] if single else pts
    for _ in range(n):
        pts = system.map_batch(pts)
        yield pts[0] if single else pts


def orbit_array(system, x, n: int) -> np.ndarray:
    """Materialize ``orbit`` as an array of shape (n + 1, ...)."""
    return np.array(list(orbit(system, x, n)))


def closed_form_log_derivative(system, factor_index, x, n: int, trace: bool = False):
    """Chain-rule log-sum ln (f_i^n)'(x_i) = sum_j ln f_i'(f_i^j x_i) for a 1-D factor.

    ``x`` may be one point or a batch.  With ``trace=True`` the partial sums
    for 0..n are returned along a new leading axis.
    """
    system = as_system(system)
    if isinstance(factor_index, str):
        factor_index = system.factor_index(factor_index)
    fac = system.factors[factor_index]
    if fac.dim != 1:
        raise DimensionError(f"factor {system.names[factor_index]!r} is {fac.dim}-dimensional")
    pts, single = _as_batch(x, system.d)
    y = reduce_mod1(pts[:, system.slices[factor_index]])
    total = np.zeros(y.shape[0])
    sums = [total.copy()]
    for _ in range(n):
        total = total + fac.log_derivative_batch(y)
        y = fac.map_batch(y)
        if trace:
            sums.append(total.copy())
    out = np.array(sums) if trace else total
    if single:
        return out[..., 0]
    return out


def example_3_1(beta: float = GOLDEN_UNSTABLE, table_resolution: int = 2**16) -> ProductSystem:
    """f = g x h on T^3 with h the cat map; ``beta`` sets g'(1/2)."""
    g = build_circle_map_g(GOLDEN_STABLE, beta, table_resolution)
    return ProductSystem([("g", g), ("h", build_toral(CAT_MATRIX))])
