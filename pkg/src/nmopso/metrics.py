"""Pareto-front statistics and deterministic artifact serialization."""

import json
from dataclasses import dataclass
from math import fsum, sqrt

import numpy as np

from .archive import cell_coords, rebuild_grid
from .objectives import ObjectiveVector

__all__ = [
    "FrontStats",
    "front_stats",
    "export_front",
    "export_paths",
    "export_stats",
]

_OBJECTIVE_NAMES = ("f1", "f2", "f3", "f4")


@dataclass(frozen=True)
class FrontStats:
    """Per-objective extremes/moments plus the solution-distribution ratio.

    s_d is the front size divided by the number of occupied hypergrid cells;
    1 means every member sits in its own cell (maximally spread). Standard
    deviations are population (not sample) values, since the front is the
    complete set being described.
    """

    maxima: np.ndarray
    minima: np.ndarray
    means: np.ndarray
    stds: np.ndarray
    s_d: float
    size: int
    occupied_cells: int


def _front_matrix(front):
    if isinstance(front, np.ndarray):
        f = np.asarray(front, dtype=float)
    else:
        rows = [
            v.as_array() if isinstance(v, ObjectiveVector) else np.asarray(v, dtype=float)
            for v in front
        ]
        f = np.array(rows) if rows else np.empty((0, 4))
    if f.ndim == 1:
        f = f.reshape(1, -1)
    return f


def front_stats(front, divisions=7, kappa=2.0):
    """Summarize a non-empty front of finite objective vectors.

    The occupied-cell count comes from a hypergrid fitted to the front
    itself, using the same division count as the search.
    """
    f = _front_matrix(front)
    if f.shape[0] == 0:
        raise ValueError("cannot summarize an empty front")
    if not np.isfinite(f).all():
        raise ValueError("front statistics require finite objective vectors")
    n = f.shape[0]
    means = np.array([fsum(f[:, k].tolist()) / n for k in range(f.shape[1])])
    stds = np.array(
        [
            sqrt(fsum(((f[:, k] - means[k]) ** 2).tolist()) / n)
            for k in range(f.shape[1])
        ]
    )
    grid = rebuild_grid(f, divisions, kappa)
    occupied = len(np.unique(cell_coords(grid, f), axis=0))
    return FrontStats(
        maxima=f.max(axis=0),
        minima=f.min(axis=0),
        means=means,
        stds=stds,
        s_d=n / occupied,
        size=n,
        occupied_cells=occupied,
    )


def _sorted_front(result):
    indexed = sorted(
        result.pareto_front,
        key=lambda item: (item[2].f1, item[2].f2, item[2].f3, item[2].f4),
    )
    return indexed


def export_front(result):
    """CSV of front objective vectors, lexicographically ordered, lossless floats."""
    lines = [",".join(_OBJECTIVE_NAMES)]
    for _, _, ov in _sorted_front(result):
        lines.append(",".join(repr(float(v)) for v in (ov.f1, ov.f2, ov.f3, ov.f4)))
    return "\n".join(lines) + "\n"


def export_paths(result):
    """JSON list of front members with objectives and decoded waypoints.

    Ordered identically to export_front, so row k of the CSV describes
    element k of this list.
    """
    doc = [
        {
            "objectives": [float(v) for v in (ov.f1, ov.f2, ov.f3, ov.f4)],
            "waypoints": [[float(c) for c in row] for row in path.waypoints],
        }
        for _, path, ov in _sorted_front(result)
    ]
    return json.dumps(doc, indent=2) + "\n"


def export_stats(stats):
    """CSV of per-objective max/min/mean/std with a trailing s_d row."""
    lines = ["objective,max,min,mean,std"]
    for k, name in enumerate(_OBJECTIVE_NAMES):
        cells = (stats.maxima[k], stats.minima[k], stats.means[k], stats.stds[k])
        lines.append(name + "," + ",".join(repr(float(v)) for v in cells))
    lines.append(f"s_d,{float(stats.s_d)!r},,,")
    return "\n".join(lines) + "\n"
