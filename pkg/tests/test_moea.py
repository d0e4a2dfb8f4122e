"""
Tests for reference directions, survivor selection, variation, the archive and the solver loop.
"""

from dataclasses import replace

import numpy as np
import pytest

from mosg_solver.game.core import pareto_indices
from mosg_solver.game.errors import ConfigError, SolverTimeoutError
from mosg_solver.solver.archive import ArchiveEntry, FrontArchive
from mosg_solver.solver.directions import project_simplex, riesz_directions
from mosg_solver.solver.evaluate import evaluate_code
from mosg_solver.solver.moea import EAConfig, run, solve
from mosg_solver.solver.operators import polynomial_mutation, vary
from mosg_solver.solver.selection import Individual, nondominated_sort, survive


def _entry(*fit):
    return ArchiveEntry(
        code=np.ones(len(fit), dtype=int), coverage=np.zeros(3), fitness=np.array(fit)
    )


class TestDirections:
    def test_two_objectives_three_points(self):
        dirs = riesz_directions(2, 3, seed=0).dirs
        rows = sorted(map(tuple, np.round(dirs, 6)))
        expected = [(0.0, 1.0), (0.5, 0.5), (1.0, 0.0)]
        np.testing.assert_allclose(rows, expected, atol=0.05)

    def test_rows_on_simplex(self):
        dirs = riesz_directions(4, 30, seed=2).dirs
        assert dirs.shape == (30, 4)
        assert np.all(dirs >= 0)
        np.testing.assert_allclose(dirs.sum(axis=1), np.ones(30))

    def test_deterministic(self):
        a = riesz_directions(3, 12, seed=5).dirs
        b = riesz_directions(3, 12, seed=5).dirs
        np.testing.assert_array_equal(a, b)

    def test_single_objective(self):
        np.testing.assert_array_equal(riesz_directions(1, 4).dirs, np.ones((4, 1)))

    def test_too_few_points(self):
        with pytest.raises(ConfigError):
            riesz_directions(3, 2)

    def test_projection(self):
        out = project_simplex(np.array([[2.0, 0.0], [0.3, 0.3]]))
        np.testing.assert_allclose(out, [[1.0, 0.0], [0.5, 0.5]])


class TestNondominatedSort:
    def test_fronts(self):
        fit = np.array([[1, 2], [2, 1], [0, 0], [2, 1]])
        assert nondominated_sort(fit) == [[0, 1, 3], [2]]

    def test_infeasible_rows_trail_by_violation(self):
        fit = np.array([[1, 2], [9, 9], [9, 9], [0, 0]])
        assert nondominated_sort(fit, np.array([0.0, 0.3, 0.3, 0.1])) == [[0], [3], [1, 2]]

    def test_matches_brute_force(self):
        rng = np.random.default_rng(0)
        fit = rng.integers(0, 5, size=(40, 3)).astype(float)
        fronts = nondominated_sort(fit)
        assert sorted(i for f in fronts for i in f) == list(range(40))
        remaining = list(range(40))
        for front in fronts:
            best = [remaining[i] for i in pareto_indices(fit[remaining])]
            dupes = [j for j in remaining if any(np.array_equal(fit[j], fit[b]) for b in best)]
            assert sorted(front) == sorted(dupes)
            remaining = [j for j in remaining if j not in front]


class TestSurvive:
    def _individuals(self, two_attacker_prepared, codes):
        inst, order, ideal = two_attacker_prepared
        return [
            Individual(genome=np.array(c), result=evaluate_code(inst, order, ideal, c))
            for c in codes
        ]

    def test_everyone_fits(self, two_attacker_prepared):
        inds = self._individuals(two_attacker_prepared, [(1, 1), (2, 2), (3, 2), (4, 4)])
        dirs = riesz_directions(2, 4)
        pop = survive(inds, dirs, 4, np.random.default_rng(0))
        assert {id(m) for m in pop} == {id(m) for m in inds}

    def test_feasible_first(self, two_attacker_prepared):
        inds = self._individuals(two_attacker_prepared, [(4, 4), (1, 1), (2, 2), (4, 4)])
        pop = survive(inds, riesz_directions(2, 2), 2, np.random.default_rng(0))
        assert all(m.feasible for m in pop)
        assert sorted(m.rank for m in pop) == [0, 1]


class TestVariation:
    def _population(self, two_attacker_prepared):
        inst, order, ideal = two_attacker_prepared
        inds = [
            Individual(genome=np.array(c), result=evaluate_code(inst, order, ideal, c))
            for c in [(1, 1), (2, 2), (3, 2), (1, 4)]
        ]
        return survive(inds, riesz_directions(2, 4), 4, np.random.default_rng(0))

    def test_integer_offspring_within_bounds(self, two_attacker_prepared):
        pop = self._population(two_attacker_prepared)
        kids = vary(pop, 7, np.array([1, 1]), np.array([4, 4]), np.random.default_rng(1))
        assert kids.shape == (7, 2)
        assert kids.dtype.kind == "i"
        assert np.all((kids >= 1) & (kids <= 4))

    def test_deterministic_per_seed(self, two_attacker_prepared):
        pop = self._population(two_attacker_prepared)
        a = vary(pop, 6, np.array([1, 1]), np.array([4, 4]), np.random.default_rng(9), "hux")
        b = vary(pop, 6, np.array([1, 1]), np.array([4, 4]), np.random.default_rng(9), "hux")
        np.testing.assert_array_equal(a, b)

    def test_parents_untouched(self, two_attacker_prepared):
        pop = self._population(two_attacker_prepared)
        before = pop.genomes().copy()
        vary(pop, 4, np.array([1, 1]), np.array([4, 4]), np.random.default_rng(2))
        np.testing.assert_array_equal(pop.genomes(), before)

    def test_fixed_genes_never_move(self):
        x = np.full((50, 2), 3.0)
        out = polynomial_mutation(
            x, np.array([1.0, 3.0]), np.array([5.0, 3.0]), np.random.default_rng(0), 1.0, 20.0
        )
        assert np.all(out[:, 1] == 3.0)
        assert np.all((out[:, 0] >= 1.0) & (out[:, 0] <= 5.0))


class TestArchive:
    def test_add_and_evict(self):
        archive = FrontArchive()
        assert archive.add(_entry(1.0, 2.0))
        assert archive.add(_entry(2.0, 1.0))
        assert not archive.add(_entry(0.0, 0.0))
        assert not archive.add(_entry(1.0, 2.0))
        assert len(archive) == 2
        assert archive.add(_entry(3.0, 3.0))
        assert len(archive) == 1
        np.testing.assert_array_equal(archive.fitness_matrix(), [[3.0, 3.0]])

    def test_sorted_entries(self):
        archive = FrontArchive.from_entries([_entry(1.0, 2.0), _entry(2.0, 1.0)])
        assert [e.fitness.tolist() for e in archive.sorted_entries()] == [[2.0, 1.0], [1.0, 2.0]]
        assert FrontArchive().sorted_entries() == []

    def test_near_duplicates_rejected(self):
        archive = FrontArchive.from_entries([_entry(1.0, 1.0)])
        assert not archive.add(_entry(1.0 + 1e-12, 1.0))

    def test_resources(self):
        entry = ArchiveEntry(code=np.array([1]), coverage=np.array([0.2, 0.3]), fitness=np.ones(1))
        assert entry.resources == pytest.approx(0.5)


class TestEAConfig:
    def test_defaults_by_objective_count(self):
        three = EAConfig().resolved(3)
        assert (three.pop_size, three.max_gen) == (50, 50)
        assert three.mutation_prob == pytest.approx(1 / 3)
        many = EAConfig().resolved(5)
        assert (many.pop_size, many.max_gen) == (400, 300)

    def test_explicit_values_kept(self):
        cfg = EAConfig(pop_size=20, max_gen=3, mutation_prob=0.2).resolved(4)
        assert (cfg.pop_size, cfg.max_gen, cfg.mutation_prob) == (20, 3, 0.2)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"pop_size": 1},
            {"max_gen": 0},
            {"crossover": "pmx"},
            {"restoration": "lp"},
            {"genome": "coverage"},
            {"mutation_prob": 1.5},
            {"time_limit": 0.0},
            {"polish_codes": -1},
            {"polish_limit": -1},
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigError):
            EAConfig(**kwargs).resolved(2)

    def test_from_dict(self):
        cfg = EAConfig.from_dict({"pop_size": 30, "refine": False})
        assert cfg.pop_size == 30 and not cfg.refine
        assert EAConfig.from_dict(cfg.to_dict()) == cfg
        with pytest.raises(ConfigError, match="popsize"):
            EAConfig.from_dict({"popsize": 30})


class TestSolve:
    def test_front_is_nondominated_and_feasible(self, small_instance, tiny_config):
        result = solve(small_instance, tiny_config)
        fit = result.archive.fitness_matrix()
        assert len(result.archive) > 0
        assert len(pareto_indices(fit)) == len(fit)
        for entry in result.archive:
            assert entry.resources <= small_instance.budget + 1e-9
        assert result.evaluations == tiny_config.pop_size * (tiny_config.max_gen + 1)

    def test_worker_count_does_not_change_result(self, small_instance, tiny_config):
        one = solve(small_instance, tiny_config, workers=1).archive
        two = solve(small_instance, tiny_config, workers=2).archive
        np.testing.assert_array_equal(
            [e.fitness for e in one.sorted_entries()], [e.fitness for e in two.sorted_entries()]
        )
        np.testing.assert_array_equal(
            [e.coverage for e in one.sorted_entries()], [e.coverage for e in two.sorted_entries()]
        )

    def test_run_returns_the_solve_archive(self, small_instance, tiny_config):
        archive = run(small_instance, tiny_config)
        expected = solve(small_instance, tiny_config).archive
        np.testing.assert_array_equal(archive.fitness_matrix(), expected.fitness_matrix())

    def test_history(self, small_instance, tiny_config):
        config = EAConfig(pop_size=12, max_gen=8, seed=3, track_history=True)
        seen = []
        result = solve(small_instance, config, on_generation=lambda g, a: seen.append(g))
        assert [h.generation for h in result.history] == list(range(9))
        assert seen == list(range(9))
        hv = [h.hv for h in result.history if h.archive_size]
        assert hv and all(b >= a - 1e-9 for a, b in zip(hv, hv[1:]))

    def test_time_limit(self, small_instance):
        with pytest.raises(SolverTimeoutError):
            solve(small_instance, EAConfig(pop_size=12, max_gen=50, time_limit=1e-9))

    def test_coverage_genome(self, small_instance):
        config = EAConfig(pop_size=12, max_gen=5, seed=1, genome="coverage", refine=False)
        archive = solve(small_instance, config).archive
        assert len(archive) > 0
        for entry in archive:
            assert entry.resources <= small_instance.budget + 1e-9
            assert np.all(entry.code >= 1)

    def test_random_restoration_is_seeded(self, small_instance):
        config = EAConfig(pop_size=12, max_gen=5, seed=4, restoration="random", refine=False)
        a = solve(small_instance, config).archive.fitness_matrix()
        b = solve(small_instance, config).archive.fitness_matrix()
        np.testing.assert_array_equal(a, b)

    def test_refinement_never_loses_ground(self, small_instance, tiny_config):
        raw = solve(small_instance, replace(tiny_config, refine=False)).archive
        refined = solve(small_instance, tiny_config).archive
        ref_fit = refined.fitness_matrix()
        for entry in raw:
            assert np.any(np.all(ref_fit >= entry.fitness - 1e-6, axis=1))

    def test_polishing_switched_off_keeps_searched_codes(self, small_instance, tiny_config):
        config = replace(tiny_config, polish_limit=0)
        archive = solve(small_instance, config).archive
        assert len(archive) > 0
        assert len(pareto_indices(archive.fitness_matrix())) == len(archive)

    def test_visited_codes_are_polished_when_the_lattice_is_large(
        self, small_instance, tiny_config
    ):
        lattice = solve(small_instance, tiny_config).archive.fitness_matrix()
        visited = solve(small_instance, replace(tiny_config, polish_codes=0)).archive
        # every visited-code restoration is also a lattice restoration
        for f in visited.fitness_matrix():
            assert np.any(np.all(lattice >= f - 1e-6, axis=1))
