"""Report and plot-data writers.

Plot-data tables are CSV files with a header row, ``\\n`` line endings and
floats written with ``repr`` (shortest round-tripping form, always ``.`` as
decimal separator).  Column headers:

* ``ratio_profile_<splitting>.csv``: ``x1, ..., xd, a_<S>``
* ``convergence_<splitting>.csv``: ``n, a_n_over_n``
* ``bound_trace_<splitting>.csv``: ``i, t_i, c_t_i, bound`` where
  ``bound = i * ln(1 - epsilon * lambda)``
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass
class PlotTable:
    columns: list
    rows: list = field(default_factory=list)


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def emit_plot_data(table: PlotTable, path) -> Path:
    """Write one table as CSV; an empty table gives a header-only file.

    Raises:
        OSError: the path is not writable.
    """
    path = Path(path)
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(table.columns)
        for row in table.rows:
            w.writerow([_cell(v) for v in row])
    return path


def plain(obj):
    """Convert numpy values and non-finite floats into JSON-ready data."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if isinstance(obj, np.generic):
        return plain(obj.item())
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def dumps_canonical(payload) -> str:
    """Deterministic JSON text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(plain(payload), sort_keys=True, indent=1, ensure_ascii=True, allow_nan=False) + "\n"
