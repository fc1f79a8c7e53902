"""Uniform sample grids on T^d used to evaluate "for all x" statements.

Grid verdicts are evidence, never proofs: a violation on the grid is
conclusive, the absence of one is not.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, ParameterError
from .systems import as_system, reduce_mod1

DEFAULT_CIRCLE_POINTS = 256
DEFAULT_TORAL_POINTS = 64


@dataclass(frozen=True)
class GridSpec:
    """Product grid ``{i / n_k}`` on each axis plus optional extra points.

    Attributes:
        resolutions: points per coordinate axis.
        extra_points: additional points, shape ``(m, d)``.
    """

    resolutions: tuple
    extra_points: np.ndarray = field(default=None, compare=False)

    def __post_init__(self):
        res = tuple(int(r) for r in self.resolutions)
        if not res or min(res) < 1:
            raise ParameterError("grid resolutions must be positive", field="grid")
        object.__setattr__(self, "resolutions", res)
        extra = self.extra_points
        if extra is None:
            extra = np.zeros((0, len(res)))
        extra = np.atleast_2d(np.asarray(extra, dtype=float))
        if extra.size == 0:
            extra = np.zeros((0, len(res)))
        if extra.shape[1] != len(res):
            raise DimensionError(f"extra points must have dimension {len(res)}")
        object.__setattr__(self, "extra_points", reduce_mod1(extra))

    @classmethod
    def default(cls, system, extra_points=None):
        """256 points per 1-D factor axis, 64 per axis of higher-dimensional factors."""
        system = as_system(system)
        res = []
        for fac in system.factors:
            n = DEFAULT_CIRCLE_POINTS if fac.dim == 1 else DEFAULT_TORAL_POINTS
            res.extend([n] * fac.dim)
        return cls(tuple(res), extra_points)

    @classmethod
    def uniform(cls, system, n, extra_points=None):
        return cls((int(n),) * as_system(system).d, extra_points)

    @property
    def d(self):
        return len(self.resolutions)

    @property
    def size(self):
        return int(np.prod(self.resolutions, dtype=np.int64)) + len(self.extra_points)

    def axis_values(self, k):
        return np.arange(self.resolutions[k]) / self.resolutions[k]

    def points(self):
        """All grid points in lexicographic order, then the extra points."""
        axes = [self.axis_values(k) for k in range(self.d)]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=-1)
        return np.concatenate([pts, self.extra_points])

    def evaluation_points(self, system, collapse=True):
        """Points on which a grid sweep must actually be evaluated.

        Coordinates of factors with a constant Jacobian never influence the
        derivative cocycle of a product map, so with ``collapse`` those
        coordinates are pinned to 0.  Each returned point then stands for
        every grid point sharing its other coordinates, and is the
        lexicographically smallest of them.  Extra points are always kept.
        Output is sorted lexicographically and duplicate-free.
        """
        system = as_system(system)
        if system.d != self.d:
            raise DimensionError(f"grid is {self.d}-dimensional but the system is on T^{system.d}")
        if not collapse:
            return _lexsorted_unique(self.points())
        vary = system.varying_axes
        axes = [self.axis_values(k) if vary[k] else np.zeros(1) for k in range(self.d)]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=-1)
        return _lexsorted_unique(np.concatenate([pts, self.extra_points]))

    def describe(self):
        out = {"resolutions": list(self.resolutions), "size": self.size}
        if len(self.extra_points):
            out["extra_points"] = self.extra_points.tolist()
        return out


def _lexsorted_unique(pts):
    if len(pts) == 0:
        return pts
    order = np.lexsort(pts.T[::-1])
    pts = pts[order]
    keep = np.ones(len(pts), dtype=bool)
    keep[1:] = np.any(np.diff(pts, axis=0) != 0, axis=1)
    return pts[keep]
