"""Box-counting density of orbits: desk-scale evidence about minimality."""

from __future__ import annotations

import numpy as np

from ..errors import ParameterError, ResolutionError
from ..systems import RotationSystem, as_system, reduce_mod1

MAX_BOXES = 10**8


def visited_boxes(system, x, n, resolution, axes=None):
    """Set of box indices hit by x, f(x), ..., f^{n-1}(x) (as a sorted array).

    ``resolution`` is the number of boxes per axis; ``axes`` restricts the
    count to a coordinate marginal.
    """
    system = as_system(system)
    axes = list(range(system.d)) if axes is None else [int(a) for a in axes]
    resolution = int(resolution)
    if resolution < 1:
        raise ResolutionError("resolution must be >= 1", field="resolution")
    if resolution ** len(axes) > MAX_BOXES:
        raise ResolutionError(f"{resolution}^{len(axes)} boxes exceeds the limit of {MAX_BOXES}", field="resolution")
    if int(n) < 1:
        raise ParameterError("n must be >= 1", field="n")
    cur = reduce_mod1(np.asarray(x, dtype=float))[None, :]
    coords = np.empty((int(n), len(axes)))
    for j in range(int(n)):
        coords[j] = cur[0, axes]
        cur = system.map_batch(cur)
    cells = np.minimum((coords * resolution).astype(np.int64), resolution - 1)
    flat = np.ravel_multi_index(cells.T, (resolution,) * len(axes))
    return np.unique(flat)


def minimality_probe(system, x, n, resolution, axes=None) -> float:
    """Fraction of boxes visited by the length-n orbit of x.

    Values near 1 are consistent with a dense orbit; a fraction that stays
    bounded away from 1 as n grows is evidence against minimality.  Neither
    is a proof.
    """
    axes_count = as_system(system).d if axes is None else len(axes)
    hits = visited_boxes(system, x, n, resolution, axes)
    return len(hits) / float(int(resolution) ** axes_count)


def declared_minimality(system):
    """Minimality flag declared for products of rotations, else 'unknown'.

    Rational independence is never decided from floating-point frequencies;
    a product of rotations is flagged minimal only when it is a single
    rotation factor declared known-minimal.
    """
    system = as_system(system)
    flags = [f.minimality_flag for f in system.factors if isinstance(f, RotationSystem)]
    if len(flags) != len(system.factors):
        return "unknown"
    if "known-non-minimal" in flags:
        return "known-non-minimal"
    if len(flags) == 1:
        return flags[0]
    return "unknown"
