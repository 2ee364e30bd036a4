"""Repository of non-dominated solutions with an adaptive hypergrid.

The grid partitions objective space to measure crowding: sparsely occupied
cells are favored when picking leaders and crowded cells are favored when
pruning past capacity. The grid is rebuilt from the current entries after
every update, so its bounds track the front as it moves.
"""

import math
from dataclasses import dataclass

import numpy as np

from .navigation import NavPath
from .objectives import ObjectiveVector

__all__ = [
    "ArchiveEntry",
    "Hypergrid",
    "Archive",
    "dominates",
    "non_dominated_mask",
    "rebuild_grid",
    "cell_coord",
    "cell_coords",
    "crowd_measure",
]


def _as_vector(v):
    if isinstance(v, ObjectiveVector):
        return v.as_array()
    return np.asarray(v, dtype=float)


def dominates(a, b):
    """True iff a is no worse than b everywhere and strictly better somewhere."""
    a = _as_vector(a)
    b = _as_vector(b)
    return bool((a <= b).all() and (a < b).any())


def non_dominated_mask(vectors):
    """Boolean mask of rows not dominated by any other row (pairwise, O(n^2))."""
    f = np.asarray(vectors, dtype=float)
    le = (f[:, None, :] <= f[None, :, :]).all(axis=2)
    lt = (f[:, None, :] < f[None, :, :]).any(axis=2)
    dominated = (le & lt).any(axis=0)
    return ~dominated


@dataclass(frozen=True)
class Hypergrid:
    """Adaptive partition of objective space into divisions-per-axis cells."""

    lower: np.ndarray
    upper: np.ndarray
    pad: np.ndarray
    divisions: int
    kappa: float

    def __post_init__(self):
        for name in ("lower", "upper", "pad"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if self.divisions < 2:
            raise ValueError(f"grid divisions must be at least 2, got {self.divisions}")
        if (self.pad < 0.0).any():
            raise ValueError("grid padding must be nonnegative")
        if (self.lower > self.upper).any():
            raise ValueError("grid lower bound exceeds upper bound")


def rebuild_grid(vectors, divisions, kappa=2.0):
    """Fit a padded hypergrid around a non-empty set of objective vectors.

    Each axis is padded by half a cell width, (max - min) / (2 (M - 1)), so
    extreme members do not sit exactly on the grid boundary.
    """
    f = np.asarray(vectors, dtype=float)
    if f.ndim == 1:
        f = f.reshape(1, -1)
    if f.shape[0] == 0:
        raise ValueError("cannot build a grid from an empty set")
    if not np.isfinite(f).all():
        raise ValueError("grid requires finite objective vectors")
    lo = f.min(axis=0)
    hi = f.max(axis=0)
    pad = (hi - lo) / (2.0 * (divisions - 1))
    return Hypergrid(lo - pad, hi + pad, pad, int(divisions), float(kappa))


def _round_half_away(x):
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def cell_coords(grid, vectors):
    """Integer cell coordinates, one row per vector.

    Coordinates follow round-half-away-from-zero and land in [0, M] for any
    vector inside the padded bounds; axes with zero extent map to cell 0.
    """
    f = np.asarray(vectors, dtype=float)
    span = grid.upper - grid.lower
    safe = np.where(span > 0.0, span, 1.0)
    ratio = np.where(span > 0.0, (f - grid.lower) / safe, 0.0)
    return _round_half_away(grid.divisions * ratio).astype(np.int64)


def cell_coord(grid, vector):
    """Cell coordinate of a single objective vector."""
    return cell_coords(grid, _as_vector(vector).reshape(1, -1))[0]


def crowd_measure(count, kappa):
    """Inverse-density score exp(-kappa * count) of a cell holding count members."""
    if count < 1:
        raise ValueError(f"cell population must be at least 1, got {count}")
    return math.exp(-kappa * count)


@dataclass(frozen=True)
class ArchiveEntry:
    """One stored solution: its decision payload and finite objectives.

    nav is a NavPath under the navigation encoding; the Cartesian-encoding
    ablation stores the raw interior-waypoint vector instead.
    """

    nav: "NavPath | np.ndarray"
    objectives: ObjectiveVector

    def __post_init__(self):
        if not self.objectives.feasible:
            raise ValueError("archive entries must have finite objectives")


class Archive:
    """Bounded store of mutually non-dominated solutions.

    Mutated only by a single coordinator between evaluation phases; leader
    selection during one iteration reads a frozen snapshot.
    """

    def __init__(self, capacity=100, divisions=7, kappa=2.0, rng=None):
        if capacity < 1:
            raise ValueError(f"capacity must be at least 1, got {capacity}")
        self.capacity = int(capacity)
        self.divisions = int(divisions)
        self.kappa = float(kappa)
        self._rng = rng if rng is not None else np.random.default_rng(0)
        self.entries: list[ArchiveEntry] = []
        self.grid: Hypergrid | None = None
        self._cells = np.empty((0, 4), dtype=np.int64)
        self._groups: list[np.ndarray] = []
        self._probs = np.empty(0)

    def __len__(self):
        return len(self.entries)

    def objective_matrix(self):
        """(n, 4) array of stored objective vectors, in entry order."""
        if not self.entries:
            return np.empty((0, 4))
        return np.array([e.objectives.as_array() for e in self.entries])

    @property
    def cells(self):
        """Cell coordinate of each entry under the current grid."""
        return self._cells.copy()

    def occupied_cell_count(self):
        return len(self._groups)

    def leader_probabilities(self):
        """(unique cells, per-cell selection probabilities), crowd-biased."""
        if not self._groups:
            return np.empty((0, 4), dtype=np.int64), np.empty(0)
        uniq = np.array([self._cells[g[0]] for g in self._groups], dtype=np.int64)
        return uniq, self._probs.copy()

    def update(self, candidates):
        """Merge candidates, keep the non-dominated subset, prune, refit the grid.

        Candidates must carry finite objectives. When the merged front
        exceeds capacity, victims are drawn from cells with probability
        rising exponentially in their population (the inverse of the
        leader-selection bias) until the capacity holds.
        """
        merged = list(self.entries)
        for entry in candidates:
            if not entry.objectives.feasible:
                raise ValueError("candidate objectives must be finite")
            merged.append(entry)
        if not merged:
            return
        f = np.array([e.objectives.as_array() for e in merged])
        keep = non_dominated_mask(f)
        kept = [e for e, ok in zip(merged, keep) if ok]
        f = f[keep]

        if len(kept) > self.capacity:
            grid = rebuild_grid(f, self.divisions, self.kappa)
            cells = cell_coords(grid, f)
            while len(kept) > self.capacity:
                uniq, inverse, counts = np.unique(
                    cells, axis=0, return_inverse=True, return_counts=True
                )
                # Shift before exponentiating to keep weights finite.
                weights = np.exp(self.kappa * (counts - counts.max()))
                probs = weights / weights.sum()
                cell_idx = int(self._rng.choice(len(uniq), p=probs))
                members = np.flatnonzero(inverse == cell_idx)
                victim = int(members[self._rng.integers(members.size)])
                del kept[victim]
                cells = np.delete(cells, victim, axis=0)
                f = np.delete(f, victim, axis=0)

        self.entries = kept
        self.grid = rebuild_grid(f, self.divisions, self.kappa)
        self._cells = cell_coords(self.grid, f)
        self._refresh_selection_cache()

    def _refresh_selection_cache(self):
        uniq, inverse, counts = np.unique(
            self._cells, axis=0, return_inverse=True, return_counts=True
        )
        self._groups = [np.flatnonzero(inverse == k) for k in range(len(uniq))]
        gamma = np.exp(-self.kappa * (counts - counts.min()))
        self._probs = gamma / gamma.sum()

    def select_leader(self, rng):
        """Draw one entry: a cell by crowd-biased probability, then uniform within it."""
        if not self.entries:
            raise ValueError("cannot select a leader from an empty archive")
        cell_idx = int(rng.choice(len(self._probs), p=self._probs))
        members = self._groups[cell_idx]
        return self.entries[int(members[rng.integers(members.size)])]
