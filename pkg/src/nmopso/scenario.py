"""Planning problem definition: endpoints, obstacles, margins, altitude band, limits."""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .terrain import TerrainError, TerrainGrid, generate_terrain, load_terrain

__all__ = [
    "ScenarioError",
    "Obstacle",
    "KinematicLimits",
    "HeadingState",
    "Scenario",
    "parse_scenario",
    "serialize_scenario",
]

_REQUIRED_FIELDS = (
    "terrain",
    "start",
    "goal",
    "obstacles",
    "drone_size",
    "safe_distance",
    "r_min",
    "h_min",
    "h_max",
    "theta_max",
    "psi_max",
    "v_min",
    "v_max",
    "n_nodes",
)

_GENERATE_FIELDS = ("width", "height", "cellsize", "roughness", "seed")


class ScenarioError(ValueError):
    """Invalid scenario contents."""


@dataclass(frozen=True)
class Obstacle:
    """Infinite-height cylinder; distance tests use the xy-projection only."""

    x: float
    y: float
    radius: float

    def __post_init__(self):
        if not self.radius > 0.0:
            raise ScenarioError(f"obstacle radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class KinematicLimits:
    """Per-step climb/turn angle bounds plus recorded (unenforced) speed range.

    Decoded paths carry no time parametrization, so v_min/v_max are stored
    for reporting only; no operation consumes them.
    """

    theta_max: float
    psi_max: float
    v_min: float = 0.0
    v_max: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.theta_max <= math.pi / 2:
            raise ScenarioError(f"theta_max must lie in (0, pi/2], got {self.theta_max}")
        if not 0.0 < self.psi_max <= math.pi:
            raise ScenarioError(f"psi_max must lie in (0, pi], got {self.psi_max}")
        if self.v_min > self.v_max:
            raise ScenarioError(f"v_min {self.v_min} exceeds v_max {self.v_max}")


@dataclass(frozen=True)
class HeadingState:
    """Absolute climb/turn orientation of a flight direction, radians."""

    climb: float
    turn: float

    def __post_init__(self):
        if not -math.pi / 2 < self.climb <= math.pi / 2:
            raise ScenarioError(f"climb must lie in (-pi/2, pi/2], got {self.climb}")


@dataclass(frozen=True)
class Scenario:
    """One planning problem instance. Immutable after construction.

    start and goal are 3-D points in meters; h_min/h_max bound the altitude
    above local terrain; n_nodes is the number of decoded interior waypoints.
    """

    terrain: TerrainGrid
    start: np.ndarray
    goal: np.ndarray
    obstacles: tuple[Obstacle, ...]
    drone_size: float
    safe_distance: float
    r_min: float
    h_min: float
    h_max: float
    limits: KinematicLimits
    n_nodes: int
    terrain_source: dict | str | None = field(default=None, compare=False)

    def __post_init__(self):
        start = np.array(self.start, dtype=float).reshape(-1)
        goal = np.array(self.goal, dtype=float).reshape(-1)
        if start.shape != (3,) or goal.shape != (3,):
            raise ScenarioError("start and goal must be 3-D points")
        if not (np.isfinite(start).all() and np.isfinite(goal).all()):
            raise ScenarioError("start and goal must be finite")
        if np.array_equal(start, goal):
            raise ScenarioError("start and goal must differ")
        if not self.terrain.contains(start[0], start[1]):
            raise ScenarioError("start lies outside the terrain footprint")
        if not self.terrain.contains(goal[0], goal[1]):
            raise ScenarioError("goal lies outside the terrain footprint")
        if not self.h_min < self.h_max:
            raise ScenarioError(f"h_min {self.h_min} must be below h_max {self.h_max}")
        if not self.r_min > 0.0:
            raise ScenarioError(f"r_min must be positive, got {self.r_min}")
        if self.drone_size < 0.0:
            raise ScenarioError(f"drone_size must be nonnegative, got {self.drone_size}")
        if self.safe_distance < 0.0:
            raise ScenarioError(f"safe_distance must be nonnegative, got {self.safe_distance}")
        if int(self.n_nodes) < 1 or int(self.n_nodes) != self.n_nodes:
            raise ScenarioError(f"n_nodes must be a positive integer, got {self.n_nodes}")
        start.flags.writeable = False
        goal.flags.writeable = False
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "goal", goal)
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        object.__setattr__(self, "n_nodes", int(self.n_nodes))

    @property
    def straight_distance(self):
        """Euclidean start-to-goal distance, meters."""
        d = self.goal - self.start
        return float(math.sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]))

    @property
    def r_max_cap(self):
        """Upper bound on a single decoded segment length.

        Twice the start-goal chord divided by the node count, so a decoded
        path can never exceed twice the chord length.
        """
        return 2.0 * self.straight_distance / self.n_nodes


def _require(raw, key):
    if key not in raw:
        raise ScenarioError(f"missing scenario field {key!r}")
    return raw[key]


def _as_number(value, key):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"field {key!r} must be a number, got {value!r}")
    return float(value)


def _load_terrain_spec(spec, base_dir):
    if isinstance(spec, str):
        path = Path(spec)
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        try:
            text = path.read_text()
        except OSError as exc:
            raise ScenarioError(f"cannot read terrain file {path}: {exc}") from exc
        try:
            return load_terrain(text)
        except TerrainError as exc:
            raise ScenarioError(f"terrain file {path}: {exc}") from exc
    if isinstance(spec, dict) and set(spec.keys()) == {"generate"}:
        params = spec["generate"]
        if not isinstance(params, dict):
            raise ScenarioError("terrain generate block must be an object")
        unknown = set(params) - set(_GENERATE_FIELDS)
        if unknown:
            raise ScenarioError(f"unknown terrain generate fields: {sorted(unknown)}")
        missing = set(_GENERATE_FIELDS) - set(params)
        if missing:
            raise ScenarioError(f"missing terrain generate fields: {sorted(missing)}")
        try:
            return generate_terrain(
                params["width"],
                params["height"],
                params["cellsize"],
                params["roughness"],
                params["seed"],
            )
        except TerrainError as exc:
            raise ScenarioError(f"terrain generation failed: {exc}") from exc
    raise ScenarioError("terrain must be a file path or a {generate: {...}} block")


def parse_scenario(text, base_dir=None):
    """Parse scenario JSON into a validated Scenario.

    Relative terrain file paths are resolved against base_dir (defaults to
    the working directory). All lengths are meters, all angles radians.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ScenarioError("scenario must be a JSON object")
    unknown = set(raw) - set(_REQUIRED_FIELDS)
    if unknown:
        raise ScenarioError(f"unknown scenario fields: {sorted(unknown)}")
    for key in _REQUIRED_FIELDS:
        _require(raw, key)

    terrain_spec = raw["terrain"]
    terrain = _load_terrain_spec(terrain_spec, base_dir)

    for key in ("start", "goal"):
        if not isinstance(raw[key], list) or len(raw[key]) != 3:
            raise ScenarioError(f"field {key!r} must be a [x, y, z] triple")
    if not isinstance(raw["obstacles"], list):
        raise ScenarioError("field 'obstacles' must be a list")
    obstacles = []
    for k, entry in enumerate(raw["obstacles"]):
        if not isinstance(entry, dict) or set(entry) != {"x", "y", "radius"}:
            raise ScenarioError(
                f"obstacle {k} must be an object with fields x, y, radius"
            )
        obstacles.append(
            Obstacle(
                _as_number(entry["x"], "obstacles.x"),
                _as_number(entry["y"], "obstacles.y"),
                _as_number(entry["radius"], "obstacles.radius"),
            )
        )

    limits = KinematicLimits(
        theta_max=_as_number(raw["theta_max"], "theta_max"),
        psi_max=_as_number(raw["psi_max"], "psi_max"),
        v_min=_as_number(raw["v_min"], "v_min"),
        v_max=_as_number(raw["v_max"], "v_max"),
    )
    n_nodes = raw["n_nodes"]
    if isinstance(n_nodes, bool) or not isinstance(n_nodes, int):
        raise ScenarioError(f"n_nodes must be an integer, got {n_nodes!r}")

    return Scenario(
        terrain=terrain,
        start=[_as_number(v, "start") for v in raw["start"]],
        goal=[_as_number(v, "goal") for v in raw["goal"]],
        obstacles=tuple(obstacles),
        drone_size=_as_number(raw["drone_size"], "drone_size"),
        safe_distance=_as_number(raw["safe_distance"], "safe_distance"),
        r_min=_as_number(raw["r_min"], "r_min"),
        h_min=_as_number(raw["h_min"], "h_min"),
        h_max=_as_number(raw["h_max"], "h_max"),
        limits=limits,
        n_nodes=n_nodes,
        terrain_source=terrain_spec,
    )


def serialize_scenario(scenario):
    """Render a parsed Scenario back to its JSON form.

    Requires the scenario to carry the terrain source it was parsed from,
    so parse(serialize(s)) reproduces every field including the grid.
    """
    if scenario.terrain_source is None:
        raise ScenarioError("scenario has no recorded terrain source; cannot serialize")
    doc = {
        "terrain": scenario.terrain_source,
        "start": [float(v) for v in scenario.start],
        "goal": [float(v) for v in scenario.goal],
        "obstacles": [
            {"x": o.x, "y": o.y, "radius": o.radius} for o in scenario.obstacles
        ],
        "drone_size": scenario.drone_size,
        "safe_distance": scenario.safe_distance,
        "r_min": scenario.r_min,
        "h_min": scenario.h_min,
        "h_max": scenario.h_max,
        "theta_max": scenario.limits.theta_max,
        "psi_max": scenario.limits.psi_max,
        "v_min": scenario.limits.v_min,
        "v_max": scenario.limits.v_max,
        "n_nodes": scenario.n_nodes,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
