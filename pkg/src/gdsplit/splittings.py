"""Candidate Df-invariant splittings TM = E + F and checks of their invariance."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DimensionError, InvalidBasisError, NumericError, ParameterError
from .grids import GridSpec
from .systems import RotationSystem, ToralAutomorphism, as_system

ORTHONORMAL_TOL = 1e-10
TRANSVERSALITY_TOL = 1e-6
INVARIANCE_TOL = 1e-8


def check_orthonormal(frame, tol=ORTHONORMAL_TOL, what="basis"):
    """Raise InvalidBasisError unless the columns of ``frame`` (or of each
    frame in a stack) are orthonormal within ``tol``."""
    frame = np.asarray(frame, dtype=float)
    if frame.ndim < 2 or frame.shape[-1] < 1:
        raise InvalidBasisError(f"{what} must be a d x r matrix with r >= 1, got shape {frame.shape}")
    if not np.all(np.isfinite(frame)):
        raise InvalidBasisError(f"{what} has non-finite entries")
    gram = np.swapaxes(frame, -1, -2) @ frame
    err = np.max(np.abs(gram - np.eye(frame.shape[-1])))
    if err > tol:
        raise InvalidBasisError(f"{what} is not orthonormal: max |B^T B - I| = {err:.3e} > {tol:g}")
    return frame


def principal_angles(U, V):
    """Principal angles between span(U) and span(V), ascending, in [0, pi/2].

    Both frames must be orthonormal with the same number of columns.
    Stacks of frames (leading batch axes) are supported.
    """
    U = np.asarray(U, dtype=float)
    V = np.asarray(V, dtype=float)
    if U.ndim == 1:
        U = U[:, None]
    if V.ndim == 1:
        V = V[:, None]
    if U.shape[-1] != V.shape[-1] or U.shape[-2] != V.shape[-2]:
        raise DimensionError(f"frames of shapes {U.shape} and {V.shape} have different rank or ambient dimension")
    s = np.linalg.svd(np.swapaxes(U, -1, -2) @ V, compute_uv=False)
    # small angles lose accuracy through arccos; use the sine form there
    angles = np.arccos(np.clip(s, 0.0, 1.0))
    small = s > np.cos(0.1)
    if np.any(small):
        resid = V - U @ (np.swapaxes(U, -1, -2) @ V)
        sin = np.linalg.svd(resid, compute_uv=False)[..., ::-1]
        angles = np.where(small, np.arcsin(np.clip(sin, 0.0, 1.0)), angles)
    return np.sort(angles, axis=-1)


@dataclass(frozen=True, eq=False)
class SplittingSpec:
    """Fiberwise orthonormal frames for E(x) and F(x).

    Built-in splittings use constant frames (``const_E``/``const_F``).  A
    fiberwise splitting supplies callables mapping a batch of points
    ``(N, d)`` to frames ``(N, d, r)``.
    """

    label: str
    d: int
    dim_E: int
    dim_F: int
    const_E: Optional[np.ndarray] = None
    const_F: Optional[np.ndarray] = None
    field_E: Optional[Callable] = None
    field_F: Optional[Callable] = None
    terms: tuple = ()

    @property
    def constant(self):
        return self.const_E is not None

    def frame_E(self, pts):
        return self._frame(pts, self.const_E, self.field_E, self.dim_E)

    def frame_F(self, pts):
        return self._frame(pts, self.const_F, self.field_F, self.dim_F)

    def basis_E(self, x):
        return self.frame_E(np.atleast_2d(x))[0]

    def basis_F(self, x):
        return self.frame_F(np.atleast_2d(x))[0]

    def _frame(self, pts, const, fn, r):
        pts = np.atleast_2d(pts)
        if const is not None:
            return np.broadcast_to(const, (pts.shape[0], self.d, r))
        frames = np.asarray(fn(pts), dtype=float)
        if frames.shape != (pts.shape[0], self.d, r):
            raise DimensionError(f"splitting {self.label!r} frame field returned shape {frames.shape}")
        return frames

    def continuity_evidence(self, grid: Optional[GridSpec] = None):
        """Condition (1) evidence: structural for constant frames, a sampled
        Lipschitz estimate (largest principal angle per unit distance between
        grid neighbours along each axis) otherwise."""
        if self.constant:
            return {"continuous": True, "basis": "constant frames, continuous by construction"}
        if grid is None:
            raise ParameterError("a grid is needed to sample continuity of a fiberwise splitting")
        worst = 0.0
        pts = grid.points()[: int(np.prod(grid.resolutions))]
        for k in range(self.d):
            step = 1.0 / grid.resolutions[k]
            nb = pts.copy()
            nb[:, k] = np.mod(nb[:, k] + step, 1.0)
            for get in (self.frame_E, self.frame_F):
                ang = principal_angles(get(pts), get(nb))[..., -1]
                worst = max(worst, float(np.max(ang)) / step)
        return {"continuous": None, "basis": "sampled Lipschitz estimate (evidence only)", "lipschitz_estimate": worst}


def _orthonormal_columns(cols, what):
    mat = np.column_stack(cols)
    q, r = np.linalg.qr(mat)
    if np.min(np.abs(np.diag(r))) < 1e-12:
        raise ParameterError(f"{what} terms are linearly dependent")
    return q * np.sign(np.diag(r))


def constant_splitting(E, F, label="E+F"):
    """Splitting with constant frames; columns are orthonormalized.

    Raises:
        ParameterError: trivial splitting, dimension mismatch, or E and F
            not transversal.
    """
    E = np.atleast_2d(np.asarray(E, dtype=float))
    F = np.atleast_2d(np.asarray(F, dtype=float))
    if E.shape[0] != F.shape[0]:
        raise DimensionError("E and F frames live in different dimensions")
    d = E.shape[0]
    if E.shape[1] * F.shape[1] == 0:
        raise ParameterError("splitting is trivial: dim(E) * dim(F) = 0")
    if E.shape[1] + F.shape[1] != d:
        raise DimensionError(f"dim E + dim F = {E.shape[1] + F.shape[1]} != {d}")
    E = _orthonormal_columns(list(E.T), "E")
    F = _orthonormal_columns(list(F.T), "F")
    check_orthonormal(E, what="E frame")
    check_orthonormal(F, what="F frame")
    if transversality_angle(E, F) < TRANSVERSALITY_TOL:
        raise ParameterError(f"E and F intersect nontrivially in splitting {label!r}")
    E.setflags(write=False)
    F.setflags(write=False)
    return SplittingSpec(label=label, d=d, dim_E=E.shape[1], dim_F=F.shape[1], const_E=E, const_F=F)


def fiberwise_splitting(frame_E, frame_F, d, dim_E, dim_F, label="E(x)+F(x)"):
    if dim_E * dim_F == 0:
        raise ParameterError("splitting is trivial: dim(E) * dim(F) = 0")
    if dim_E + dim_F != d:
        raise DimensionError(f"dim E + dim F = {dim_E + dim_F} != {d}")
    return SplittingSpec(label=label, d=d, dim_E=dim_E, dim_F=dim_F, field_E=frame_E, field_F=frame_F)


def transversality_angle(E, F):
    """Smallest principal angle between span(E) and span(F); 0 means they meet."""
    s = np.linalg.svd(np.swapaxes(E, -1, -2) @ F, compute_uv=False)
    return float(np.min(np.arccos(np.clip(np.max(s, axis=-1), 0.0, 1.0))))


# ---------------------------------------------------------------------------
# building splittings from factor terms

_SELECTORS = ("factor", "axis", "stable", "unstable")


def term_frame(system, term):
    """Columns (d x k) spanned by one declaration term.

    Terms are tuples: ``("factor", name)`` for all axes of a factor,
    ``("axis", name, i)`` for one axis, ``("stable", name)`` and
    ``("unstable", name)`` for eigen-directions of a toral factor.
    """
    system = as_system(system)
    kind, name = term[0], term[1]
    if kind not in _SELECTORS:
        raise ParameterError(f"unknown splitting term {kind!r}")
    idx = system.factor_index(name)
    fac, sl = system.factors[idx], system.slices[idx]
    if kind == "factor":
        local = np.eye(fac.dim)
    elif kind == "axis":
        i = int(term[2])
        if not 0 <= i < fac.dim:
            raise ParameterError(f"factor {name!r} has no axis {i}")
        local = np.eye(fac.dim)[:, [i]]
    else:
        if not isinstance(fac, ToralAutomorphism):
            raise ParameterError(f"{kind}({name}) needs a toral factor, {name!r} is {fac.kind}")
        local = fac.stable_frame if kind == "stable" else fac.unstable_frame
    out = np.zeros((system.d, local.shape[1]))
    out[sl, :] = local
    return out


def splitting_from_terms(system, E_terms, F_terms, label=None):
    system = as_system(system)
    E = np.column_stack([term_frame(system, t) for t in E_terms])
    F = np.column_stack([term_frame(system, t) for t in F_terms])
    if label is None:
        label = f"E={format_terms(E_terms)}; F={format_terms(F_terms)}"
    spec = constant_splitting(E, F, label=label)
    return SplittingSpec(label=spec.label, d=spec.d, dim_E=spec.dim_E, dim_F=spec.dim_F,
                         const_E=spec.const_E, const_F=spec.const_F,
                         terms=(tuple(E_terms), tuple(F_terms)))


def format_terms(terms):
    parts = []
    for t in terms:
        if t[0] == "factor":
            parts.append(t[1])
        elif t[0] == "axis":
            parts.append(f"axis({t[1]}, {t[2]})")
        else:
            parts.append(f"{t[0]}({t[1]})")
    return " + ".join(parts)


def invariant_lines(system, terms):
    """Decompose terms into one-dimensional invariant lines with known log-stretch.

    Returns a list of ``(kind, factor_name, value)`` where kind is ``"circle"``
    (value: axis index; stretch from the chain rule), ``"rotation"`` (stretch
    0), or ``"eigen"`` (value: eigenvalue of the toral factor).  Used by the
    closed-form oracle; raises for terms that are not sums of such lines.
    """
    system = as_system(system)
    lines = []
    for t in terms:
        fac = system.factor(t[1])
        if isinstance(fac, ToralAutomorphism):
            if t[0] == "stable":
                lines += [("eigen", t[1], lam) for lam in fac.stable_eigenvalues]
            elif t[0] == "unstable":
                lines += [("eigen", t[1], lam) for lam in fac.unstable_eigenvalues]
            else:
                raise ParameterError("toral axes are not invariant lines")
        elif isinstance(fac, RotationSystem):
            axes = range(fac.dim) if t[0] == "factor" else [t[2]]
            lines += [("rotation", t[1], i) for i in axes]
        else:
            lines.append(("circle", t[1], 0))
    return lines


# ---------------------------------------------------------------------------
# invariance


@dataclass
class InvarianceReport:
    max_principal_angle_defect: float
    worst_point: np.ndarray
    grid: GridSpec
    defect_E: float
    defect_F: float
    invariant: bool
    points_evaluated: int

    def to_dict(self):
        return {
            "max_principal_angle_defect": self.max_principal_angle_defect,
            "defect_E": self.defect_E,
            "defect_F": self.defect_F,
            "worst_point": self.worst_point.tolist(),
            "invariant": self.invariant,
            "evidence": "grid evidence" if self.invariant else "violation found",
            "grid": self.grid.describe(),
            "points_evaluated": self.points_evaluated,
        }


def _pushed_defect(system, pts, frames_x, frames_fx):
    J = system.jacobian_batch(pts)
    pushed = J @ frames_x
    q, r = np.linalg.qr(pushed)
    diag = np.abs(np.diagonal(r, axis1=-2, axis2=-1))
    if np.any(~np.isfinite(diag)) or np.any(diag < 1e-300):
        bad = int(np.flatnonzero(np.any(~(diag >= 1e-300), axis=-1))[0])
        raise NumericError("pushed frame is degenerate", point=pts[bad], operation="check_invariance")
    return principal_angles(q, frames_fx)[..., -1]


def check_invariance(system, splitting, grid=None, invariance_tol=INVARIANCE_TOL):
    """Largest principal angle between Df(x)E(x) and E(f x), and the same for F.

    Returns an InvarianceReport; ``invariant`` is True when the worst defect
    is at most ``invariance_tol`` radians on the grid.
    """
    system = as_system(system)
    grid = grid or GridSpec.default(system)
    pts = grid.evaluation_points(system, collapse=splitting.constant)
    fx = system.map_batch(pts)
    dE = _pushed_defect(system, pts, splitting.frame_E(pts), splitting.frame_E(fx))
    dF = _pushed_defect(system, pts, splitting.frame_F(pts), splitting.frame_F(fx))
    both = np.maximum(dE, dF)
    i = int(np.argmax(both))
    worst = float(both[i])
    return InvarianceReport(
        max_principal_angle_defect=worst,
        worst_point=pts[i],
        grid=grid,
        defect_E=float(np.max(dE)),
        defect_F=float(np.max(dF)),
        invariant=worst <= invariance_tol,
        points_evaluated=len(pts),
    )
