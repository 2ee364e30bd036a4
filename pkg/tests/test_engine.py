import math

import numpy as np
import pytest

from nmopso import (
    Archive,
    ArchiveEntry,
    NavPath,
    NmopsoEngine,
    ObjectiveVector,
    SwarmConfig,
    dominates,
    mutate,
    mutation_gain,
    nav_bounds,
    non_dominated_mask,
    run,
    run_weighted_pso,
)
from nmopso.engine import Particle


def small_config(**overrides):
    cfg = SwarmConfig(population=12, max_iterations=15, seed=7)
    for key, value in overrides.items():
        setattr(cfg, key, value)
    return cfg


class TestInitSwarm:
    def test_same_seed_bit_identical(self, flat_scenario):
        a = NmopsoEngine(flat_scenario, small_config())
        b = NmopsoEngine(flat_scenario, small_config())
        a.init_swarm()
        b.init_swarm()
        for pa, pb in zip(a.particles, b.particles):
            assert np.array_equal(pa.position, pb.position)
            assert np.array_equal(pa.objectives, pb.objectives)

    def test_positions_within_bounds(self, flat_scenario):
        engine = NmopsoEngine(flat_scenario, small_config())
        engine.init_swarm()
        lo, hi = nav_bounds(flat_scenario)
        for p in engine.particles:
            assert (p.position >= lo).all() and (p.position <= hi).all()
            assert np.array_equal(p.velocity, np.zeros(lo.size))
            assert np.array_equal(p.pbest_position, p.position)

    def test_flat_scenario_finds_feasible_across_seeds(self, flat_scenario):
        feasible = 0
        for seed in range(10):
            engine = NmopsoEngine(flat_scenario, SwarmConfig(population=50, seed=seed))
            engine.init_swarm()
            feasible += len(engine.archive)
        assert feasible >= 1

    def test_delta_defaults_to_initial_occupancy(self, flat_scenario):
        engine = NmopsoEngine(flat_scenario, SwarmConfig(population=50, seed=3))
        engine.init_swarm()
        assert engine.delta == max(1, engine.archive.occupied_cell_count())

    def test_delta_override(self, flat_scenario):
        engine = NmopsoEngine(flat_scenario, small_config(delta=5.0))
        engine.init_swarm()
        assert engine.delta == 5.0


class _ForcedOnesRng:
    """Stub stream: vector draws return ones, scalars defer to a real stream."""

    def __init__(self, base):
        self.base = base

    def random(self, size=None):
        if size is None:
            return self.base.random()
        return np.ones(size)

    def integers(self, *args, **kwargs):
        return self.base.integers(*args, **kwargs)

    def standard_normal(self, *args, **kwargs):
        return self.base.standard_normal(*args, **kwargs)

    def choice(self, *args, **kwargs):
        return self.base.choice(*args, **kwargs)


class TestStep:
    def test_velocity_reduces_to_social_term(self, flat_scenario):
        cfg = small_config(inertia=0.0, c1=0.0, c2=0.5, v_max_fraction=1.0, disable_mutation=True)
        engine = NmopsoEngine(flat_scenario, cfg)
        engine.init_swarm()
        lo, hi = engine.encoding.lower, engine.encoding.upper
        span = hi - lo
        rng = np.random.default_rng(0)
        for k, p in enumerate(engine.particles):
            p.position = lo + (0.3 + 0.04 * k) * span
            p.velocity = np.zeros(lo.size)
        leader_vec = lo + 0.5 * span
        leader_obj = engine._evaluate_vec(leader_vec)
        assert np.isfinite(leader_obj).all()  # mid-band straight-ish path
        engine.archive = Archive(capacity=10, rng=np.random.default_rng(1))
        engine.archive.update(
            [ArchiveEntry(NavPath.from_flat(leader_vec), ObjectiveVector.from_array(leader_obj))]
        )
        engine._rngs = [_ForcedOnesRng(np.random.default_rng(100 + i)) for i in range(len(engine.particles))]
        before = [p.position.copy() for p in engine.particles]
        engine.step()
        for p, x0 in zip(engine.particles, before):
            assert np.array_equal(p.velocity, 0.5 * (leader_vec - x0))
            assert np.array_equal(p.position, x0 + 0.5 * (leader_vec - x0))

    def test_positions_stay_bounded_and_finite(self, obstacle_scenario):
        engine = NmopsoEngine(obstacle_scenario, small_config(max_iterations=100))
        engine.init_swarm()
        lo, hi = engine.encoding.lower, engine.encoding.upper
        for _ in range(100):
            engine.step()
            for p in engine.particles:
                assert np.isfinite(p.position).all() and np.isfinite(p.velocity).all()
                assert (p.position >= lo).all() and (p.position <= hi).all()

    def test_pbest_never_replaced_by_dominated_vector(self, obstacle_scenario):
        engine = NmopsoEngine(obstacle_scenario, small_config(max_iterations=40))
        engine.init_swarm()
        previous = [p.pbest_objectives.copy() for p in engine.particles]
        for _ in range(40):
            engine.step()
            for p, old in zip(engine.particles, previous):
                assert not dominates(old, p.pbest_objectives)
            previous = [p.pbest_objectives.copy() for p in engine.particles]

    def test_front_never_regresses(self, obstacle_scenario):
        engine = NmopsoEngine(obstacle_scenario, small_config(population=20, max_iterations=60))
        engine.init_swarm()
        prev_front = engine.archive.objective_matrix()
        for _ in range(60):
            engine.step()
            front = engine.archive.objective_matrix()
            if len(prev_front) and len(front):
                for old_row in prev_front:
                    assert not all(dominates(old_row, new_row) for new_row in front)
            prev_front = front


class TestMutation:
    def test_gain_analytic(self):
        assert mutation_gain(5, 5.0) == pytest.approx(math.tanh(1.0), abs=1e-12)
        assert mutation_gain(1, 5.0) == pytest.approx(math.tanh(5.0), abs=1e-12)

    def test_gain_asymptote(self):
        assert mutation_gain(501, 5.0) < 0.01

    def test_gain_strictly_decreasing(self):
        values = [mutation_gain(n, 5.0) for n in range(1, 40)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_gain_requires_occupied_cell(self):
        with pytest.raises(ValueError):
            mutation_gain(0, 5.0)

    def make_particle(self, dim=12):
        return Particle(
            position=np.zeros(dim),
            velocity=np.zeros(dim),
            pbest_position=np.ones(dim),
            pbest_objectives=np.full(4, 0.5),
            objectives=np.full(4, 0.5),
        )

    def test_zero_gain_no_change(self):
        p = self.make_particle()
        mutate(p, 0.0, np.random.default_rng(0), np.full(12, -10.0), np.full(12, 10.0))
        assert np.array_equal(p.position, np.zeros(12))

    def test_single_dimension_changes(self):
        rng = np.random.default_rng(1)
        lo, hi = np.full(12, -100.0), np.full(12, 100.0)
        for _ in range(100):
            p = self.make_particle()
            mutate(p, 0.5, rng, lo, hi)
            assert np.count_nonzero(p.position) <= 1

    def test_monte_carlo_std(self):
        rng = np.random.default_rng(2)
        lo, hi = np.full(1, -1000.0), np.full(1, 1000.0)
        steps = []
        for _ in range(10000):
            p = self.make_particle(dim=1)
            mutate(p, 1.0, rng, lo, hi)
            steps.append(p.position[0])
        assert abs(np.std(steps) - 1.0) < 0.05

    def test_disable_mutation_counts_zero(self, flat_scenario):
        result = run(flat_scenario, small_config(disable_mutation=True, max_iterations=30))
        assert result.mutation_count == 0

    def test_mutation_occurs_when_enabled(self, flat_scenario):
        result = run(flat_scenario, small_config(max_iterations=30, mutation_prob=0.5))
        assert result.mutation_count > 0


class TestRun:
    def test_same_seed_identical_fronts(self, obstacle_scenario):
        cfg = small_config(population=20, max_iterations=40)
        a = run(obstacle_scenario, cfg)
        b = run(obstacle_scenario, small_config(population=20, max_iterations=40))
        fa, fb = a.front_objectives(), b.front_objectives()
        assert np.array_equal(fa, fb)

    def test_threads_do_not_change_results(self, obstacle_scenario):
        cfg1 = small_config(population=16, max_iterations=30)
        cfg2 = small_config(population=16, max_iterations=30)
        a = run(obstacle_scenario, cfg1, threads=1)
        b = run(obstacle_scenario, cfg2, threads=3)
        assert np.array_equal(a.front_objectives(), b.front_objectives())

    def test_front_members_feasible_and_nondominated(self, obstacle_scenario):
        result = run(obstacle_scenario, small_config(population=20, max_iterations=40))
        front = result.front_objectives()
        assert len(front) >= 1
        assert np.isfinite(front).all()
        assert non_dominated_mask(front).all()

    def test_front_payloads_decode_consistently(self, obstacle_scenario):
        result = run(obstacle_scenario, small_config(population=20, max_iterations=30))
        for nav, path, objectives in result.pareto_front:
            assert isinstance(nav, NavPath)
            assert len(path) == obstacle_scenario.n_nodes + 2
            assert objectives.feasible

    def test_flat_scenario_reaches_near_straight(self, flat_scenario):
        result = run(flat_scenario, SwarmConfig(population=50, max_iterations=200, seed=1))
        front = result.front_objectives()
        assert front[:, 0].min() <= 0.01

    def test_invalid_config_rejected(self, flat_scenario):
        with pytest.raises(ValueError):
            run(flat_scenario, SwarmConfig(population=1))

    def test_cartesian_ablation_runs(self, obstacle_scenario):
        cfg = small_config(population=20, max_iterations=40, cartesian_encoding=True)
        result = run(obstacle_scenario, cfg)
        for nav, path, objectives in result.pareto_front:
            assert isinstance(nav, np.ndarray)
            assert nav.size == 3 * obstacle_scenario.n_nodes
            assert objectives.feasible

    def test_zero_iterations_returns_init_front(self, flat_scenario):
        result = run(flat_scenario, small_config(population=30, max_iterations=0))
        assert result.iterations_run == 0


class TestWeightedBaseline:
    def test_history_monotone_nonincreasing(self, obstacle_scenario):
        res = run_weighted_pso(obstacle_scenario, small_config(population=20, max_iterations=50))
        history = res.cost_history
        assert all(a >= b for a, b in zip(history, history[1:]))
        assert res.cost == history[-1]

    def test_same_seed_identical(self, obstacle_scenario):
        a = run_weighted_pso(obstacle_scenario, small_config(population=16, max_iterations=30))
        b = run_weighted_pso(obstacle_scenario, small_config(population=16, max_iterations=30))
        assert a.cost == b.cost
        assert np.array_equal(a.path.waypoints, b.path.waypoints)

    def test_threads_do_not_change_results(self, obstacle_scenario):
        a = run_weighted_pso(obstacle_scenario, small_config(population=16, max_iterations=30), threads=1)
        b = run_weighted_pso(obstacle_scenario, small_config(population=16, max_iterations=30), threads=3)
        assert a.cost == b.cost

    def test_median_improvement_at_least_half(self, flat_scenario):
        ratios = []
        for seed in range(10):
            cfg = SwarmConfig(population=30, max_iterations=60, seed=seed)
            res = run_weighted_pso(flat_scenario, cfg)
            initial, final = res.cost_history[0], res.cost_history[-1]
            assert math.isfinite(final)
            ratios.append(final / initial if math.isfinite(initial) else 0.0)
        assert np.median(ratios) <= 0.5
