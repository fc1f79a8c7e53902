"""Reference computations that avoid the cocycle engine entirely."""

import numpy as np


def gram_max_singular_value(m, squarings=64):
    """Largest singular value of m via a Rayleigh quotient of m^T m.

    Repeated normalized squaring of the Gram matrix projects onto its top
    eigenspace, so repeated or nearly repeated top eigenvalues cost nothing.
    """
    g = m.T @ m
    scale = np.max(np.abs(g))
    if scale == 0:
        return 0.0
    h = g / scale
    for _ in range(squarings):
        h = h @ h
        h /= np.max(np.abs(h))
    v = h[:, np.argmax(np.linalg.norm(h, axis=0))]
    v = v / np.linalg.norm(v)
    return float(np.sqrt(max(v @ g @ v, 0.0)))


def _line_logs(system, terms, x, n):
    """Log-stretch after n steps of each invariant line named by ``terms``."""
    logs = []
    for t in terms:
        k = system.factor_index(t[1])
        fac = system.factors[k]
        if fac.kind == "circle_g":
            y = np.asarray(x, dtype=float)[:, system.slices[k]][:, 0].copy()
            total = np.zeros(len(y))
            for _ in range(n):
                total += np.log(fac.alpha + (fac.beta - fac.alpha) * np.sin(np.pi * y) ** (2 * fac.p))
                y = fac.g(y)
                y[y >= 1.0] = 0.0
            logs.append(total)
        elif fac.kind == "toral":
            ev = np.linalg.eigvalsh(np.asarray(fac.matrix, dtype=float))  # symmetric built-ins only
            picks = ev[np.abs(ev) < 1] if t[0] == "stable" else ev[np.abs(ev) > 1]
            logs += [np.full(len(x), n * np.log(abs(v))) for v in picks]
        else:
            count = fac.dim if t[0] == "factor" else 1
            logs += [np.zeros(len(x))] * count
    return np.array(logs)


def chain_rule_a_n(system, E_terms, F_terms, x, n):
    """a_n for splittings into mutually orthogonal invariant lines."""
    x = np.atleast_2d(x)
    return _line_logs(system, E_terms, x, n).max(axis=0) - _line_logs(system, F_terms, x, n).min(axis=0)
