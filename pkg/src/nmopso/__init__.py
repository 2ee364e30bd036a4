"""Multi-objective UAV path planning over terrain with a navigation-variable swarm."""

from .archive import (
    Archive,
    ArchiveEntry,
    Hypergrid,
    cell_coord,
    cell_coords,
    crowd_measure,
    dominates,
    non_dominated_mask,
    rebuild_grid,
)
from .engine import (
    BaselineResult,
    NmopsoEngine,
    Particle,
    RunResult,
    SwarmConfig,
    mutate,
    mutation_gain,
    run,
    run_weighted_pso,
)
from .metrics import FrontStats, export_front, export_paths, export_stats, front_stats
from .navigation import (
    JointCheck,
    KinematicReport,
    NavPath,
    decode,
    heading_of,
    initial_pose,
    nav_bounds,
    recover_nav,
    segment_transform,
    validate_kinematics,
)
from .objectives import (
    INFEASIBLE,
    CartesianPath,
    ObjectiveVector,
    WeightVector,
    altitude_cost,
    collision_cost,
    evaluate_all,
    parse_path_text,
    path_length_cost,
    path_to_text,
    smoothness_cost,
    turning_angle,
    weighted_sum,
)
from .scenario import (
    HeadingState,
    KinematicLimits,
    Obstacle,
    Scenario,
    ScenarioError,
    parse_scenario,
    serialize_scenario,
)
from .terrain import OutOfBoundsError, TerrainError, TerrainGrid, generate_terrain, load_terrain

__version__ = "0.1.0"
