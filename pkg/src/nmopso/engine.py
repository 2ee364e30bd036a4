"""Swarm search over the navigation encoding with archive-guided leaders.

One master seed feeds per-particle random streams plus a separate archive
stream, so results are reproducible and independent of how evaluations are
parallelized: all random draws happen in the sequential coordinator phases,
and only the pure decode/evaluate work may run on a thread pool.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .archive import Archive, ArchiveEntry, dominates
from .navigation import NavPath, decode, nav_bounds
from .objectives import CartesianPath, ObjectiveVector, WeightVector, evaluate_all, weighted_sum

__all__ = [
    "SwarmConfig",
    "Particle",
    "RunResult",
    "BaselineResult",
    "NmopsoEngine",
    "mutation_gain",
    "mutate",
    "run",
    "run_weighted_pso",
]

logger = logging.getLogger(__name__)


@dataclass
class SwarmConfig:
    """Swarm parameters; defaults are the standard experiment settings."""

    population: int = 50
    max_iterations: int = 200
    inertia: float = 1.0
    inertia_damping: float = 0.98
    c1: float = 1.5
    c2: float = 1.5
    grid_divisions: int = 7
    kappa: float = 2.0
    delta: float | None = None  # None: use the occupied-cell count at initialization
    mutation_prob: float = 0.1
    v_max_fraction: float = 0.5
    archive_capacity: int = 100
    seed: int = 42
    disable_mutation: bool = False
    cartesian_encoding: bool = False

    def validate(self):
        if self.population < 2:
            raise ValueError(f"population must be at least 2, got {self.population}")
        if self.max_iterations < 0:
            raise ValueError(f"max_iterations must be nonnegative, got {self.max_iterations}")
        if not 0.0 <= self.mutation_prob <= 1.0:
            raise ValueError(f"mutation_prob must lie in [0, 1], got {self.mutation_prob}")
        if not 0.0 < self.v_max_fraction <= 1.0:
            raise ValueError(f"v_max_fraction must lie in (0, 1], got {self.v_max_fraction}")
        if self.grid_divisions < 2:
            raise ValueError(f"grid_divisions must be at least 2, got {self.grid_divisions}")
        if self.archive_capacity < 1:
            raise ValueError(f"archive_capacity must be at least 1, got {self.archive_capacity}")
        if self.kappa < 0.0:
            raise ValueError(f"kappa must be nonnegative, got {self.kappa}")
        if self.delta is not None and self.delta <= 0.0:
            raise ValueError(f"delta must be positive when set, got {self.delta}")
        if not 0.0 < self.inertia_damping <= 1.0:
            raise ValueError(f"inertia_damping must lie in (0, 1], got {self.inertia_damping}")


@dataclass
class Particle:
    """Swarm member state in the flat encoding space."""

    position: np.ndarray
    velocity: np.ndarray
    pbest_position: np.ndarray
    pbest_objectives: np.ndarray
    objectives: np.ndarray


@dataclass
class RunResult:
    """Final Pareto set with decoded paths plus run bookkeeping."""

    pareto_front: list[tuple[object, CartesianPath, ObjectiveVector]]
    iterations_run: int
    wall_time: float
    rng_seed: int
    mutation_count: int = 0
    evaluation_count: int = 0

    def front_objectives(self):
        """(n, 4) array of front objective vectors."""
        if not self.pareto_front:
            return np.empty((0, 4))
        return np.array([ov.as_array() for _, _, ov in self.pareto_front])


@dataclass
class BaselineResult:
    """Best solution found by the weighted-sum baseline."""

    nav: object
    path: CartesianPath
    objectives: ObjectiveVector
    cost: float
    cost_history: list[float] = field(default_factory=list)
    iterations_run: int = 0
    wall_time: float = 0.0
    rng_seed: int = 0


def mutation_gain(occupied_cells, delta):
    """Adaptive gain tanh(delta / occupied_cells): strong while the front is bunched."""
    if occupied_cells < 1:
        raise ValueError(f"occupied cell count must be at least 1, got {occupied_cells}")
    return math.tanh(delta / occupied_cells)


def mutate(particle, gain, rng, lower, upper):
    """Perturb one uniformly chosen dimension of the particle position.

    The step is gaussian, scaled by the gain and by the particle's own best
    value on that dimension; the result is clamped to the encoding bounds.
    A zero best component therefore leaves that dimension unchanged.
    """
    j = int(rng.integers(particle.position.size))
    step = rng.standard_normal() * gain * particle.pbest_position[j]
    value = particle.position[j] + step
    particle.position[j] = min(max(value, lower[j]), upper[j])


class _Encoding:
    """Maps flat particle vectors to Cartesian paths for either encoding."""

    def __init__(self, scenario, cartesian):
        self.scenario = scenario
        self.cartesian = cartesian
        if cartesian:
            fx0, fy0, fx1, fy1 = scenario.terrain.footprint
            z_lo = scenario.terrain.min_elevation + scenario.h_min
            z_hi = scenario.terrain.max_elevation + scenario.h_max
            self.lower = np.tile([fx0, fy0, z_lo], scenario.n_nodes)
            self.upper = np.tile([fx1, fy1, z_hi], scenario.n_nodes)
        else:
            self.lower, self.upper = nav_bounds(scenario)

    @property
    def dim(self):
        return self.lower.size

    def decode_vec(self, vec):
        if self.cartesian:
            interior = np.asarray(vec, dtype=float).reshape(-1, 3)
            pts = np.vstack([self.scenario.start, interior, self.scenario.goal])
            return CartesianPath(pts)
        return decode(NavPath.from_flat(vec), self.scenario)

    def payload(self, vec):
        """Archive/report payload for a position vector."""
        if self.cartesian:
            return np.asarray(vec, dtype=float).copy()
        return NavPath.from_flat(vec)


class NmopsoEngine:
    """Multi-objective swarm run over one scenario.

    Not shareable across concurrent runs; create one engine per seed. The
    per-iteration phases are: move every particle (sequential, consumes each
    particle's own random stream), evaluate all positions (pure, optionally
    threaded), update personal bests, mutate, then update the archive.
    """

    def __init__(self, scenario, config=None, threads=0):
        self.scenario = scenario
        self.config = config if config is not None else SwarmConfig()
        self.config.validate()
        self.encoding = _Encoding(scenario, self.config.cartesian_encoding)
        self._vmax = self.config.v_max_fraction * (self.encoding.upper - self.encoding.lower)

        seedseq = np.random.SeedSequence(self.config.seed)
        children = seedseq.spawn(self.config.population + 1)
        self._rngs = [np.random.Generator(np.random.PCG64(c)) for c in children[:-1]]
        self.archive = Archive(
            capacity=self.config.archive_capacity,
            divisions=self.config.grid_divisions,
            kappa=self.config.kappa,
            rng=np.random.Generator(np.random.PCG64(children[-1])),
        )

        self._threads = threads if threads and threads > 0 else 1
        self._pool = ThreadPoolExecutor(self._threads) if self._threads > 1 else None
        self.particles: list[Particle] = []
        self.iteration = 0
        self.inertia = self.config.inertia
        self.delta = self.config.delta
        self.mutation_count = 0
        self.evaluation_count = 0

    def close(self):
        if self._pool is not None:
            self._pool.shutdown(wait=True)
            self._pool = None

    def _evaluate_vec(self, vec):
        return evaluate_all(self.encoding.decode_vec(vec), self.scenario).as_array()

    def _evaluate_many(self, vectors):
        self.evaluation_count += len(vectors)
        if self._pool is not None:
            return list(self._pool.map(self._evaluate_vec, vectors))
        return [self._evaluate_vec(v) for v in vectors]

    def init_swarm(self):
        """Sample particles uniformly within bounds and seed the archive."""
        lo, hi = self.encoding.lower, self.encoding.upper
        span = hi - lo
        positions = [lo + rng.random(self.encoding.dim) * span for rng in self._rngs]
        objs = self._evaluate_many(positions)
        self.particles = [
            Particle(
                position=pos,
                velocity=np.zeros(self.encoding.dim),
                pbest_position=pos.copy(),
                pbest_objectives=obj.copy(),
                objectives=obj,
            )
            for pos, obj in zip(positions, objs)
        ]
        feasible = [
            ArchiveEntry(self.encoding.payload(p.position), ObjectiveVector.from_array(p.objectives))
            for p in self.particles
            if np.isfinite(p.objectives).all()
        ]
        self.archive.update(feasible)
        if not feasible:
            logger.warning(
                "no feasible particle after initialization; archive starts empty "
                "and leaders fall back to personal bests"
            )
        if self.delta is None:
            self.delta = float(max(1, self.archive.occupied_cell_count()))

    def step(self):
        """Advance the swarm by one iteration."""
        cfg = self.config
        lo, hi = self.encoding.lower, self.encoding.upper
        particles = self.particles

        for i, p in enumerate(particles):
            rng = self._rngs[i]
            if len(self.archive):
                leader_entry = self.archive.select_leader(rng)
                leader = (
                    leader_entry.nav.flat
                    if isinstance(leader_entry.nav, NavPath)
                    else leader_entry.nav
                )
            else:
                # No feasible solution yet: guide with a random personal best.
                leader = particles[int(rng.integers(len(particles)))].pbest_position
            r1 = rng.random(self.encoding.dim)
            r2 = rng.random(self.encoding.dim)
            v = (
                self.inertia * p.velocity
                + cfg.c1 * r1 * (p.pbest_position - p.position)
                + cfg.c2 * r2 * (leader - p.position)
            )
            np.clip(v, -self._vmax, self._vmax, out=v)
            x = p.position + v
            out_low = x < lo
            out_high = x > hi
            if out_low.any() or out_high.any():
                x = np.clip(x, lo, hi)
                v[out_low | out_high] = 0.0
            p.position = x
            p.velocity = v

        objs = self._evaluate_many([p.position for p in particles])

        candidates = []
        for i, p in enumerate(particles):
            rng = self._rngs[i]
            p.objectives = objs[i]
            if np.isfinite(p.objectives).all():
                candidates.append(
                    ArchiveEntry(
                        self.encoding.payload(p.position),
                        ObjectiveVector.from_array(p.objectives),
                    )
                )
            if dominates(p.objectives, p.pbest_objectives):
                p.pbest_position = p.position.copy()
                p.pbest_objectives = p.objectives.copy()
            elif dominates(p.pbest_objectives, p.objectives):
                pass
            elif rng.random() < 0.5:
                p.pbest_position = p.position.copy()
                p.pbest_objectives = p.objectives.copy()

        if not cfg.disable_mutation:
            n_r = max(1, self.archive.occupied_cell_count())
            gain = mutation_gain(n_r, self.delta)
            for i, p in enumerate(particles):
                rng = self._rngs[i]
                if rng.random() < cfg.mutation_prob:
                    mutate(p, gain, rng, lo, hi)
                    self.mutation_count += 1

        self.archive.update(candidates)
        self.inertia *= cfg.inertia_damping
        self.iteration += 1

    def run(self):
        """Initialize and iterate to completion, returning the Pareto set."""
        t0 = time.perf_counter()
        self.init_swarm()
        for _ in range(self.config.max_iterations):
            self.step()
        front = []
        for entry in self.archive.entries:
            vec = entry.nav.flat if isinstance(entry.nav, NavPath) else entry.nav
            front.append((entry.nav, self.encoding.decode_vec(vec), entry.objectives))
        return RunResult(
            pareto_front=front,
            iterations_run=self.iteration,
            wall_time=time.perf_counter() - t0,
            rng_seed=self.config.seed,
            mutation_count=self.mutation_count,
            evaluation_count=self.evaluation_count,
        )


def run(scenario, config=None, threads=0):
    """Run the full multi-objective search once. Deterministic for a fixed seed."""
    engine = NmopsoEngine(scenario, config, threads=threads)
    try:
        return engine.run()
    finally:
        engine.close()


def run_weighted_pso(scenario, config=None, weights=None, threads=0):
    """Single-objective baseline: classic global-best PSO on the scalarized cost.

    Shares the encoding, bounds, and parameter defaults with the
    multi-objective engine; only the guidance differs (one global best, no
    archive, no mutation).
    """
    config = config if config is not None else SwarmConfig()
    config.validate()
    weights = weights if weights is not None else WeightVector()
    encoding = _Encoding(scenario, config.cartesian_encoding)
    lo, hi = encoding.lower, encoding.upper
    span = hi - lo
    vmax = config.v_max_fraction * span
    dim = encoding.dim

    seedseq = np.random.SeedSequence(config.seed)
    rngs = [np.random.Generator(np.random.PCG64(c)) for c in seedseq.spawn(config.population)]

    pool = ThreadPoolExecutor(threads) if threads and threads > 1 else None

    def evaluate_many(vectors):
        def one(vec):
            ov = evaluate_all(encoding.decode_vec(vec), scenario)
            return ov, weighted_sum(ov, weights)

        if pool is not None:
            return list(pool.map(one, vectors))
        return [one(v) for v in vectors]

    t0 = time.perf_counter()
    try:
        positions = [lo + rng.random(dim) * span for rng in rngs]
        velocities = [np.zeros(dim) for _ in rngs]
        evals = evaluate_many(positions)
        pbest_pos = [p.copy() for p in positions]
        pbest_eval = list(evals)
        gbest_idx = min(range(len(rngs)), key=lambda i: pbest_eval[i][1])
        history = [pbest_eval[gbest_idx][1]]

        inertia = config.inertia
        for _ in range(config.max_iterations):
            gbest_position = pbest_pos[gbest_idx]
            for i in range(len(rngs)):
                rng = rngs[i]
                r1 = rng.random(dim)
                r2 = rng.random(dim)
                v = (
                    inertia * velocities[i]
                    + config.c1 * r1 * (pbest_pos[i] - positions[i])
                    + config.c2 * r2 * (gbest_position - positions[i])
                )
                np.clip(v, -vmax, vmax, out=v)
                x = positions[i] + v
                out_low = x < lo
                out_high = x > hi
                if out_low.any() or out_high.any():
                    x = np.clip(x, lo, hi)
                    v[out_low | out_high] = 0.0
                positions[i] = x
                velocities[i] = v
            evals = evaluate_many(positions)
            for i in range(len(rngs)):
                if evals[i][1] < pbest_eval[i][1]:
                    pbest_pos[i] = positions[i].copy()
                    pbest_eval[i] = evals[i]
            gbest_idx = min(range(len(rngs)), key=lambda i: pbest_eval[i][1])
            history.append(pbest_eval[gbest_idx][1])
            inertia *= config.inertia_damping
    finally:
        if pool is not None:
            pool.shutdown(wait=True)

    best_vec = pbest_pos[gbest_idx]
    best_objectives, best_cost = pbest_eval[gbest_idx]
    return BaselineResult(
        nav=encoding.payload(best_vec),
        path=encoding.decode_vec(best_vec),
        objectives=best_objectives,
        cost=best_cost,
        cost_history=history,
        iterations_run=config.max_iterations,
        wall_time=time.perf_counter() - t0,
        rng_seed=config.seed,
    )
