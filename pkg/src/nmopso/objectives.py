"""Normalized path objectives: length, obstacle clearance, altitude band, smoothness.

All four objectives map a Cartesian path to [0, 1], with +inf marking an
infeasible path. Infinity is absorbing in every aggregation; no large-finite
penalty surrogate is used. Every operation is a pure function of immutable
inputs and safe to evaluate concurrently.
"""

import math
from dataclasses import dataclass
from math import fsum

import numpy as np

__all__ = [
    "INFEASIBLE",
    "CartesianPath",
    "ObjectiveVector",
    "WeightVector",
    "path_length_cost",
    "collision_cost",
    "altitude_cost",
    "turning_angle",
    "smoothness_cost",
    "evaluate_all",
    "weighted_sum",
    "parse_path_text",
    "path_to_text",
]

INFEASIBLE = float("inf")


class CartesianPath:
    """Ordered 3-D waypoints from start to goal; at least one interior point."""

    __slots__ = ("waypoints",)

    def __init__(self, waypoints):
        pts = np.array(waypoints, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError(f"waypoints must have shape (m, 3), got {pts.shape}")
        if pts.shape[0] < 3:
            raise ValueError("path needs start, at least one interior waypoint, and goal")
        if not np.isfinite(pts).all():
            raise ValueError("waypoint coordinates must be finite")
        pts.flags.writeable = False
        self.waypoints = pts

    def __len__(self):
        return self.waypoints.shape[0]

    def __repr__(self):
        return f"CartesianPath({len(self)} waypoints)"


@dataclass(frozen=True)
class ObjectiveVector:
    """The four objective values; finite components lie in [0, 1]."""

    f1: float
    f2: float
    f3: float
    f4: float

    def as_array(self):
        return np.array([self.f1, self.f2, self.f3, self.f4])

    @classmethod
    def from_array(cls, arr):
        return cls(float(arr[0]), float(arr[1]), float(arr[2]), float(arr[3]))

    @property
    def feasible(self):
        return (
            math.isfinite(self.f1)
            and math.isfinite(self.f2)
            and math.isfinite(self.f3)
            and math.isfinite(self.f4)
        )


@dataclass(frozen=True)
class WeightVector:
    """Nonnegative scalarization weights; at least one must be positive."""

    w1: float = 1.0
    w2: float = 1.0
    w3: float = 1.0
    w4: float = 1.0

    def __post_init__(self):
        ws = (self.w1, self.w2, self.w3, self.w4)
        if any(w < 0.0 for w in ws):
            raise ValueError(f"weights must be nonnegative, got {ws}")
        if not any(w > 0.0 for w in ws):
            raise ValueError("at least one weight must be positive")


def _segment_lengths(pts):
    d = np.diff(pts, axis=0)
    dx, dy, dz = d[:, 0], d[:, 1], d[:, 2]
    return np.sqrt(dx * dx + dy * dy + dz * dz)


def path_length_cost(path, r_min):
    """Excess of the traveled length over the start-goal chord, in [0, 1).

    Returns 1 - chord / total, or +inf if any segment is shorter than r_min.
    A value of 0 means the path is a straight start-to-goal line.
    """
    pts = path.waypoints
    lengths = _segment_lengths(pts)
    if (lengths < r_min).any():
        return INFEASIBLE
    e = pts[-1] - pts[0]
    chord = math.sqrt(e[0] * e[0] + e[1] * e[1] + e[2] * e[2])
    total = fsum(lengths.tolist())
    return 1.0 - chord / total


def collision_cost(path, scenario):
    """Mean obstacle-proximity penalty over all (segment, obstacle) pairs.

    Distances are measured in the xy-plane from each cylinder center to the
    segment (endpoints included). A segment inside the collision radius
    drone_size + obstacle radius is an immediate +inf; inside the danger
    annulus of width safe_distance the penalty falls linearly from 1 to 0.
    With no obstacles the cost is 0 by convention.
    """
    obstacles = scenario.obstacles
    if not obstacles:
        return 0.0
    pts = path.waypoints
    ax = pts[:-1, 0][:, None]
    ay = pts[:-1, 1][:, None]
    bx = pts[1:, 0][:, None]
    by = pts[1:, 1][:, None]
    cx = np.array([o.x for o in obstacles])[None, :]
    cy = np.array([o.y for o in obstacles])[None, :]
    collision_r = np.array([scenario.drone_size + o.radius for o in obstacles])[None, :]
    safe = scenario.safe_distance

    abx = bx - ax
    aby = by - ay
    seg2 = abx * abx + aby * aby
    acx = cx - ax
    acy = cy - ay
    t = np.divide(
        acx * abx + acy * aby,
        seg2,
        out=np.zeros(np.broadcast_shapes(seg2.shape, (1, len(obstacles)))),
        where=seg2 > 0.0,
    )
    t = np.clip(t, 0.0, 1.0)
    dx = cx - (ax + t * abx)
    dy = cy - (ay + t * aby)
    dist = np.sqrt(dx * dx + dy * dy)

    danger_r = collision_r + safe
    clear = dist >= danger_r
    hit = ~clear & (dist <= collision_r)
    if hit.any():
        return INFEASIBLE
    inside = ~clear & ~hit
    terms = np.zeros_like(dist)
    terms[inside] = 1.0 - (dist[inside] - np.broadcast_to(collision_r, dist.shape)[inside]) / safe
    n_segments = pts.shape[0] - 1
    return fsum(terms.ravel().tolist()) / (len(obstacles) * n_segments)


def altitude_cost(path, scenario):
    """Mean deviation from the center of the relative-altitude band.

    Each waypoint's height above the interpolated terrain must stay within
    [h_min, h_max]; any violation, or a waypoint off the map, yields +inf.
    """
    pts = path.waypoints
    terrain = scenario.terrain
    inside = terrain.contains(pts[:, 0], pts[:, 1])
    if not np.all(inside):
        return INFEASIBLE
    ground = terrain.sample(pts[:, 0], pts[:, 1])
    h = pts[:, 2] - ground
    if ((h < scenario.h_min) | (h > scenario.h_max)).any():
        return INFEASIBLE
    h_mean = (scenario.h_max + scenario.h_min) / 2.0
    band = scenario.h_max - scenario.h_min
    terms = 2.0 * np.abs(h - h_mean) / band
    return fsum(terms.tolist()) / pts.shape[0]


def turning_angle(a, b):
    """Angle in [0, pi] between two segment vectors.

    Uses the two-argument arctangent of (|a x b|, a . b), which stays correct
    for reflex turns where the dot product is negative.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if not (np.any(a != 0.0) and np.any(b != 0.0)):
        raise ValueError("turning angle undefined for zero-length segment")
    cx = a[1] * b[2] - a[2] * b[1]
    cy = a[2] * b[0] - a[0] * b[2]
    cz = a[0] * b[1] - a[1] * b[0]
    cross_norm = math.sqrt(cx * cx + cy * cy + cz * cz)
    dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    return math.atan2(cross_norm, dot)


def smoothness_cost(path):
    """Mean turning angle over interior joints, normalized by pi.

    Joints adjacent to a degenerate (zero-length) segment contribute zero;
    such paths are already infeasible through the length objective.
    """
    pts = path.waypoints
    d = np.diff(pts, axis=0)
    a = d[:-1]
    b = d[1:]
    cx = a[:, 1] * b[:, 2] - a[:, 2] * b[:, 1]
    cy = a[:, 2] * b[:, 0] - a[:, 0] * b[:, 2]
    cz = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    cross_norm = np.sqrt(cx * cx + cy * cy + cz * cz)
    dot = a[:, 0] * b[:, 0] + a[:, 1] * b[:, 1] + a[:, 2] * b[:, 2]
    # math.atan2 per joint: the libm scalar differs from the vectorized
    # arctangent by an ulp on some inputs, and turning_angle uses the scalar.
    terms = [
        abs(math.atan2(cn, dt)) / math.pi
        for cn, dt in zip(cross_norm.tolist(), dot.tolist())
    ]
    return fsum(terms) / (pts.shape[0] - 2)


def evaluate_all(path, scenario):
    """Evaluate all four objectives; the path is feasible iff all are finite."""
    return ObjectiveVector(
        path_length_cost(path, scenario.r_min),
        collision_cost(path, scenario),
        altitude_cost(path, scenario),
        smoothness_cost(path),
    )


def weighted_sum(vector, weights):
    """Scalarize an objective vector; any infinite component absorbs to +inf."""
    if not vector.feasible:
        return INFEASIBLE
    return fsum(
        (
            weights.w1 * vector.f1,
            weights.w2 * vector.f2,
            weights.w3 * vector.f3,
            weights.w4 * vector.f4,
        )
    )


def parse_path_text(text):
    """Parse a path file: one `x y z` waypoint per line, start first, goal last."""
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = stripped.split()
        if len(tokens) != 3:
            raise ValueError(f"line {lineno}: expected 3 coordinates, got {len(tokens)}")
        try:
            rows.append([float(t) for t in tokens])
        except ValueError:
            raise ValueError(f"line {lineno}: non-numeric coordinate") from None
    if len(rows) < 3:
        raise ValueError(f"path file holds {len(rows)} waypoints, need at least 3")
    return CartesianPath(rows)


def path_to_text(path):
    """Render a path in the format accepted by parse_path_text."""
    lines = [" ".join(repr(float(v)) for v in row) for row in path.waypoints]
    return "\n".join(lines) + "\n"
