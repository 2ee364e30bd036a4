"""Per-segment range/climb/turn path encoding and its rigid-transform decoding.

A path is an articulated chain: each segment is described by (r, theta, psi)
relative to the frame carried along the previous segment, and decoded by
chaining homogeneous transforms from a start pose aimed at the goal.

Frame convention: right-handed, z up, x out the nose. A rotation about +y
pitches the nose downward in this convention, so the climb rotation is
applied about -y; positive theta therefore gains altitude.
"""

import math
from dataclasses import dataclass

import numpy as np

from .objectives import CartesianPath
from .scenario import HeadingState

__all__ = [
    "NavPath",
    "JointCheck",
    "KinematicReport",
    "nav_bounds",
    "rot_z",
    "rot_y",
    "trans_x",
    "segment_transform",
    "initial_pose",
    "heading_of",
    "decode",
    "recover_nav",
    "validate_kinematics",
    "is_rigid_transform",
]


@dataclass(frozen=True)
class NavPath:
    """Sequence of (r, theta, psi) triplets, one per decoded segment.

    Bounds (r in [r_min, r_max_cap], |theta| <= theta_max, |psi| <= psi_max)
    are scenario-dependent; use within_bounds with nav_bounds to check them.
    """

    triplets: np.ndarray

    def __post_init__(self):
        t = np.array(self.triplets, dtype=float)
        if t.ndim != 2 or t.shape[1] != 3:
            raise ValueError(f"triplets must have shape (n, 3), got {t.shape}")
        if t.shape[0] < 1:
            raise ValueError("a navigation path needs at least one triplet")
        if not np.isfinite(t).all():
            raise ValueError("triplet values must be finite")
        t.flags.writeable = False
        object.__setattr__(self, "triplets", t)

    @classmethod
    def from_flat(cls, vec):
        return cls(np.asarray(vec, dtype=float).reshape(-1, 3))

    @property
    def n(self):
        return self.triplets.shape[0]

    @property
    def flat(self):
        return self.triplets.ravel().copy()

    def within_bounds(self, lower, upper):
        flat = self.triplets.ravel()
        return bool((flat >= lower).all() and (flat <= upper).all())


def nav_bounds(scenario):
    """Per-dimension (lower, upper) arrays for the flat triplet layout."""
    lo = np.tile(
        [scenario.r_min, -scenario.limits.theta_max, -scenario.limits.psi_max],
        scenario.n_nodes,
    )
    hi = np.tile(
        [scenario.r_max_cap, scenario.limits.theta_max, scenario.limits.psi_max],
        scenario.n_nodes,
    )
    return lo, hi


def rot_z(angle):
    """Homogeneous rotation about the z axis."""
    c, s = math.cos(angle), math.sin(angle)
    out = np.eye(4)
    out[0, 0] = c
    out[0, 1] = -s
    out[1, 0] = s
    out[1, 1] = c
    return out


def rot_y(angle):
    """Homogeneous rotation about the y axis."""
    c, s = math.cos(angle), math.sin(angle)
    out = np.eye(4)
    out[0, 0] = c
    out[0, 2] = s
    out[2, 0] = -s
    out[2, 2] = c
    return out


def trans_x(dist):
    """Homogeneous translation along the x axis."""
    out = np.eye(4)
    out[0, 3] = dist
    return out


def _rotation_block(theta, psi):
    # Closed form of rot_z(psi)[:3,:3] @ rot_y(-theta)[:3,:3].
    ct, st = math.cos(theta), math.sin(theta)
    cp, sp = math.cos(psi), math.sin(psi)
    return np.array(
        [
            [cp * ct, -sp, -cp * st],
            [sp * ct, cp, -sp * st],
            [st, 0.0, ct],
        ]
    )


def segment_transform(r, theta, psi):
    """Transform carrying a frame across one segment: turn, climb, advance.

    Equal to rot_z(psi) @ rot_y(-theta) @ trans_x(r); the y rotation is
    negated so positive theta climbs (see module docstring).
    """
    out = np.eye(4)
    rot = _rotation_block(theta, psi)
    out[:3, :3] = rot
    out[:3, 3] = r * rot[:, 0]
    return out


def heading_of(vec):
    """Absolute climb/turn of a direction vector as a HeadingState."""
    vec = np.asarray(vec, dtype=float)
    horizontal = math.hypot(vec[0], vec[1])
    return HeadingState(
        climb=math.atan2(vec[2], horizontal),
        turn=math.atan2(vec[1], vec[0]),
    )


def initial_pose(start, goal):
    """Start pose: positioned at start, nose on the horizontal bearing to goal.

    Zero initial climb, z up. With start directly above or below goal the
    bearing is undefined and the nose defaults to world +x (atan2(0, 0) = 0).
    """
    start = np.asarray(start, dtype=float)
    goal = np.asarray(goal, dtype=float)
    if np.array_equal(start, goal):
        raise ValueError("start and goal coincide; initial pose undefined")
    pose = rot_z(heading_of(goal - start).turn)
    pose[:3, 3] = start
    return pose


def decode(nav, scenario):
    """Convert a navigation path to Cartesian waypoints.

    The chain starts at the scenario start pose; each triplet advances the
    frame and emits its origin as a waypoint. The goal is appended as the
    final waypoint, so the result has n + 2 points.
    """
    frame = initial_pose(scenario.start, scenario.goal)
    trips = nav.triplets
    out = np.empty((nav.n + 2, 3))
    out[0] = scenario.start
    for j in range(nav.n):
        frame = frame @ segment_transform(trips[j, 0], trips[j, 1], trips[j, 2])
        out[j + 1] = frame[:3, 3]
    out[-1] = scenario.goal
    return CartesianPath(out)


def recover_nav(path):
    """Recover per-segment (r, theta, psi) triplets from Cartesian waypoints.

    The reference pose is rebuilt from the path's own endpoints, so
    recover_nav(decode(nav)) reproduces nav on the first n triplets; the
    extra final triplet describes the appended goal segment. Consecutive
    waypoints must be distinct.
    """
    pts = path.waypoints
    deltas = np.diff(pts, axis=0)
    lengths = np.sqrt((deltas * deltas).sum(axis=1))
    if (lengths == 0.0).any():
        raise ValueError("coincident consecutive waypoints")
    rot = initial_pose(pts[0], pts[-1])[:3, :3]
    trips = np.empty((deltas.shape[0], 3))
    for j in range(deltas.shape[0]):
        local = rot.T @ deltas[j]
        psi = math.atan2(local[1], local[0])
        theta = math.atan2(local[2], math.hypot(local[0], local[1]))
        trips[j] = (lengths[j], theta, psi)
        rot = rot @ _rotation_block(theta, psi)
    return NavPath(trips)


@dataclass(frozen=True)
class JointCheck:
    """Climb/turn change at one joint and whether both stay within limits."""

    delta_climb: float
    delta_turn: float
    within_limits: bool


@dataclass(frozen=True)
class KinematicReport:
    """Per-joint angle-change report for a Cartesian path.

    joints covers every segment in order: joints[0] is the departure from the
    nominal start heading, and joints[-1] is the arrival segment onto the
    goal. The arrival joint is reported but exempt from overall_pass, since
    goal attachment cannot guarantee it.
    """

    joints: tuple[JointCheck, ...]
    overall_pass: bool

    @property
    def final_joint(self):
        return self.joints[-1]


def validate_kinematics(path, limits, tol=1e-9):
    """Check per-joint climb/turn changes against kinematic limits.

    Angle changes are recovered with the same frame chaining used by decode.
    tol absorbs round-off for joints sitting exactly on a limit.
    """
    nav = recover_nav(path)
    joints = tuple(
        JointCheck(
            float(theta),
            float(psi),
            abs(theta) <= limits.theta_max + tol and abs(psi) <= limits.psi_max + tol,
        )
        for _, theta, psi in nav.triplets
    )
    overall = all(j.within_limits for j in joints[:-1])
    return KinematicReport(joints, overall)


def is_rigid_transform(mat, tol=1e-9):
    """True if mat is homogeneous with an orthonormal, right-handed rotation."""
    mat = np.asarray(mat, dtype=float)
    if mat.shape != (4, 4):
        return False
    if not np.allclose(mat[3], [0.0, 0.0, 0.0, 1.0], atol=tol):
        return False
    rot = mat[:3, :3]
    if not np.allclose(rot @ rot.T, np.eye(3), atol=tol):
        return False
    return abs(np.linalg.det(rot) - 1.0) <= tol
