import math

import numpy as np
import pytest

from nmopso import (
    Archive,
    ArchiveEntry,
    NavPath,
    ObjectiveVector,
    cell_coord,
    cell_coords,
    crowd_measure,
    dominates,
    non_dominated_mask,
    rebuild_grid,
)


def entry(f1, f2, f3, f4):
    return ArchiveEntry(NavPath([[1.0, 0.0, 0.0]]), ObjectiveVector(f1, f2, f3, f4))


def brute_force_front(vectors):
    """Quadratic scalar-domination filter, kept independent of the archive."""
    keep = []
    for i, a in enumerate(vectors):
        dominated = False
        for j, b in enumerate(vectors):
            if i == j:
                continue
            if all(x <= y for x, y in zip(b, a)) and any(x < y for x, y in zip(b, a)):
                dominated = True
                break
        if not dominated:
            keep.append(a)
    return keep


class TestDominates:
    def test_strict_improvement(self):
        assert dominates((0.1, 0.1, 0.1, 0.1), (0.2, 0.2, 0.2, 0.2))

    def test_equal_vectors_neither(self):
        v = (0.3, 0.3, 0.3, 0.3)
        assert not dominates(v, v)

    def test_trade_off_incomparable(self):
        a, b = (0.1, 0.9, 0.1, 0.1), (0.2, 0.2, 0.2, 0.2)
        assert not dominates(a, b)
        assert not dominates(b, a)

    def test_single_component_improvement(self):
        assert dominates((0.1, 0.2, 0.2, 0.2), (0.2, 0.2, 0.2, 0.2))

    def test_accepts_objective_vectors(self):
        assert dominates(ObjectiveVector(0, 0, 0, 0), ObjectiveVector(1, 1, 1, 1))


class TestRebuildGrid:
    def test_single_entry_degenerate(self):
        grid = rebuild_grid([[0.2, 0.4, 0.6, 0.8]], divisions=7)
        assert np.array_equal(grid.pad, np.zeros(4))
        assert np.array_equal(grid.lower, [0.2, 0.4, 0.6, 0.8])
        assert np.array_equal(grid.upper, [0.2, 0.4, 0.6, 0.8])

    def test_two_entry_padding(self):
        grid = rebuild_grid([[0.0, 0, 0, 0], [1.0, 0, 0, 0]], divisions=7)
        assert grid.pad[0] == pytest.approx(1.0 / 12.0, abs=1e-15)
        assert grid.lower[0] == pytest.approx(-1.0 / 12.0, abs=1e-15)
        assert grid.upper[0] == pytest.approx(13.0 / 12.0, abs=1e-15)

    def test_deterministic(self):
        vs = np.random.default_rng(0).random((20, 4))
        a = rebuild_grid(vs, 7)
        b = rebuild_grid(vs, 7)
        assert np.array_equal(a.lower, b.lower) and np.array_equal(a.upper, b.upper)

    def test_rejects_empty_or_nonfinite(self):
        with pytest.raises(ValueError):
            rebuild_grid(np.empty((0, 4)), 7)
        with pytest.raises(ValueError):
            rebuild_grid([[0.0, 0.0, 0.0, np.inf]], 7)


class TestCellCoord:
    def test_lower_edge_is_zero(self):
        grid = rebuild_grid([[0.0, 0, 0, 0], [1.0, 0, 0, 0]], divisions=7)
        coord = cell_coord(grid, [grid.lower[0], 0.0, 0.0, 0.0])
        assert coord[0] == 0

    def test_midpoint_rounds_half_away(self):
        grid = rebuild_grid([[0.0, 0, 0, 0], [1.0, 0, 0, 0]], divisions=7)
        mid = (grid.lower[0] + grid.upper[0]) / 2.0
        coord = cell_coord(grid, [mid, 0.0, 0.0, 0.0])
        assert coord[0] == 4  # round(3.5) away from zero

    def test_degenerate_dimension_is_zero(self):
        grid = rebuild_grid([[0.5, 0.5, 0.5, 0.5]], divisions=7)
        assert np.array_equal(cell_coord(grid, [0.5, 0.5, 0.5, 0.5]), np.zeros(4))

    def test_within_zero_to_m_for_members(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            vs = rng.random((rng.integers(1, 40), 4))
            grid = rebuild_grid(vs, 7)
            coords = cell_coords(grid, vs)
            assert coords.min() >= 0
            assert coords.max() <= 7


class TestCrowdMeasure:
    def test_analytic_value(self):
        assert crowd_measure(1, 2.0) == pytest.approx(math.exp(-2.0), abs=1e-15)

    def test_zero_kappa(self):
        for n in (1, 5, 50):
            assert crowd_measure(n, 0.0) == 1.0

    def test_strictly_decreasing(self):
        values = [crowd_measure(n, 2.0) for n in range(1, 10)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_requires_population(self):
        with pytest.raises(ValueError):
            crowd_measure(0, 2.0)


class TestArchiveUpdate:
    def test_dominated_candidate_ignored(self):
        archive = Archive(capacity=10)
        archive.update([entry(0.1, 0.1, 0.1, 0.1)])
        archive.update([entry(0.2, 0.2, 0.2, 0.2)])
        assert len(archive) == 1
        assert archive.entries[0].objectives == ObjectiveVector(0.1, 0.1, 0.1, 0.1)

    def test_dominating_candidate_replaces(self):
        archive = Archive(capacity=10)
        archive.update([entry(0.2, 0.2, 0.2, 0.2)])
        archive.update([entry(0.1, 0.1, 0.1, 0.1)])
        assert len(archive) == 1
        assert archive.entries[0].objectives == ObjectiveVector(0.1, 0.1, 0.1, 0.1)

    def test_empty_update_is_identity(self):
        archive = Archive(capacity=10)
        archive.update([entry(0.5, 0.4, 0.3, 0.2), entry(0.2, 0.3, 0.4, 0.5)])
        before = [e.objectives for e in archive.entries]
        archive.update([])
        assert [e.objectives for e in archive.entries] == before

    def test_infeasible_candidate_rejected(self):
        with pytest.raises(ValueError):
            ArchiveEntry(NavPath([[1.0, 0.0, 0.0]]), ObjectiveVector(0.1, np.inf, 0.1, 0.1))

    def test_matches_brute_force_filter(self):
        rng = np.random.default_rng(21)
        for _ in range(50):
            size = int(rng.integers(1, 120))
            vectors = [tuple(rng.random(4).tolist()) for _ in range(size)]
            archive = Archive(capacity=1000)
            archive.update([entry(*v) for v in vectors])
            got = sorted(tuple(e.objectives.as_array().tolist()) for e in archive.entries)
            want = sorted(brute_force_front(vectors))
            assert got == want

    def test_duplicates_are_mutually_nondominated(self):
        archive = Archive(capacity=10)
        archive.update([entry(0.5, 0.5, 0.5, 0.5)] * 3 + [entry(0.1, 0.9, 0.5, 0.5)])
        assert len(archive) == 4

    def test_capacity_never_exceeded(self):
        rng = np.random.default_rng(22)
        archive = Archive(capacity=25, rng=np.random.default_rng(0))
        for _ in range(30):
            batch = [entry(*rng.random(4).tolist()) for _ in range(20)]
            archive.update(batch)
            assert len(archive) <= 25
            # entries stay pairwise non-dominated after every update
            mask = non_dominated_mask(archive.objective_matrix())
            assert mask.all()

    def test_pruning_prefers_crowded_cells(self):
        # one tight cluster of 30 near-identical vectors plus 10 spread ones;
        # pruning to 20 must keep the spread points far more often
        rng = np.random.default_rng(23)
        cluster = [
            entry(0.5 + 1e-6 * rng.random(), 0.5 + 1e-6 * rng.random(), 0.5, 0.5)
            for _ in range(30)
        ]
        spread = [entry(0.9 - 0.08 * k, 0.1 + 0.08 * k, 0.5, 0.5) for k in range(10)]
        archive = Archive(capacity=20, rng=np.random.default_rng(1))
        archive.update(cluster + spread)
        kept = archive.objective_matrix()
        survivors_spread = sum(
            1 for e in spread if any(np.array_equal(e.objectives.as_array(), row) for row in kept)
        )
        assert survivors_spread >= 8


class TestLeaderSelection:
    def make_two_cell_archive(self):
        # one member at one extreme, three identical at the other: with M=7
        # they occupy exactly two cells with populations 1 and 3
        archive = Archive(capacity=100, divisions=7, kappa=2.0)
        entries = [
            entry(0.0, 1.0, 0.5, 0.5),
            entry(1.0, 0.0, 0.5, 0.5),
            entry(1.0, 0.0, 0.5, 0.5),
            entry(1.0, 0.0, 0.5, 0.5),
        ]
        archive.update(entries)
        return archive

    def test_two_cell_fixture_probabilities(self):
        archive = self.make_two_cell_archive()
        cells, probs = archive.leader_probabilities()
        assert len(cells) == 2
        assert probs.sum() == pytest.approx(1.0, abs=1e-12)
        expected = math.exp(-2.0) / (math.exp(-2.0) + math.exp(-6.0))
        assert sorted(probs.tolist())[1] == pytest.approx(expected, abs=1e-9)

    def test_single_cell_certain(self):
        archive = Archive(capacity=10)
        archive.update([entry(0.5, 0.5, 0.5, 0.5)])
        rng = np.random.default_rng(3)
        chosen = archive.select_leader(rng)
        assert chosen.objectives == ObjectiveVector(0.5, 0.5, 0.5, 0.5)

    def test_empty_archive_raises(self):
        with pytest.raises(ValueError):
            Archive().select_leader(np.random.default_rng(0))

    def test_probabilities_sum_to_one_randomized(self):
        rng = np.random.default_rng(24)
        for _ in range(20):
            archive = Archive(capacity=200)
            archive.update([entry(*rng.random(4).tolist()) for _ in range(60)])
            _, probs = archive.leader_probabilities()
            assert probs.sum() == pytest.approx(1.0, abs=1e-12)

    def test_within_cell_uniform(self):
        archive = self.make_two_cell_archive()
        rng = np.random.default_rng(5)
        seen = set()
        for _ in range(500):
            chosen = archive.select_leader(rng)
            seen.add(id(chosen))
        assert len(seen) == 4  # every entry eventually selected
