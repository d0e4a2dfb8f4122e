"""
Tests for alternatives, BitOpt restoration and the other evaluation paths.
"""

import numpy as np
import pytest

from mosg_solver.bench.generator import BenchConfig, generate_instance
from mosg_solver.game.core import BUDGET_TOL, fitness
from mosg_solver.game.discretize import ideal_profile, target_order
from mosg_solver.game.errors import ArgumentError, BoundsError
from mosg_solver.solver.evaluate import (
    Option,
    alternatives,
    bitopt,
    boolean_score,
    candidate_values,
    combination_count,
    divergence_group,
    divergence_single,
    evaluate_code,
    evaluate_coverage,
    restore_exhaustive,
    restore_random,
)

from .conftest import make_instance


def test_divergence():
    assert divergence_single(2, 2) == 0
    assert divergence_single(2, 3) == 1
    assert divergence_group((3, 3, 1), (3, 0, 2)) == 2
    with pytest.raises(ArgumentError):
        divergence_group((1, 2), (1,))


class TestAlternatives:
    def test_two_attacker_code(self, two_attacker_prepared):
        inst, order, ideal = two_attacker_prepared
        alts = alternatives(inst, order, ideal, (1, 2))
        assert alts.options[3] == [Option(0.0, (0,)), Option(pytest.approx(1 / 7), (1,))]
        assert alts.options[0] == [Option(0.0, (1,))]
        assert alts.options[1] == [] and alts.options[2] == []
        assert alts.counts.tolist() == [1, 0, 0, 2]
        assert alts.attraction[3] == [0, 1]
        assert alts.work == 3
        assert alts.excluded == []

    def test_equal_values_merge(self, two_attacker_prepared):
        inst, order, ideal = two_attacker_prepared
        alts = alternatives(inst, order, ideal, (1, 1))
        assert alts.options[3] == [Option(0.0, (0, 1))]

    def test_own_value(self, two_attacker_prepared):
        inst, order, ideal = two_attacker_prepared
        alts = alternatives(inst, order, ideal, (1, 2))
        assert alts.own_value(3, 1) == pytest.approx(1 / 7)
        assert alts.own_value(3, 0) == 0.0
        assert alts.own_value(1, 0) is None

    def test_gene_above_gamma_max(self):
        inst = make_instance(-1, [[9, 5, 1]], 5, -5, r=0.1)
        order = target_order(inst)
        with pytest.raises(BoundsError):
            alternatives(inst, order, ideal_profile(inst, order), [2])


class TestBooleanScore:
    def test_keeps_smaller_value_when_nobody_wants_target(self):
        options = [Option(0.1, (0,)), Option(0.5, (1,))]
        assert boolean_score(options, 2, np.array([2, 0])) == 0

    def test_raises_coverage_to_drop_unwanted_attacker(self):
        options = [Option(0.1, (0,)), Option(0.5, (1,))]
        assert boolean_score(options, 2, np.array([0, 2])) == 1

    def test_ties_go_to_smaller_value(self):
        options = [Option(0.2, (0,)), Option(0.4, (1,))]
        assert boolean_score(options, 5, np.array([5, 5])) == 0


class TestBitOpt:
    def test_code_1_2_zero_coverage(self, two_attacker_prepared):
        inst, order, ideal = two_attacker_prepared
        res = bitopt(inst, order, (1, 2), ideal)
        assert res.feasible
        np.testing.assert_allclose(res.coverage, np.zeros(4))
        np.testing.assert_allclose(res.fitness, [-5.0, -5.0])
        assert res.ops == 6

    def test_code_2_2(self, two_attacker_prepared):
        inst, order, ideal = two_attacker_prepared
        res = evaluate_code(inst, order, ideal, (2, 2))
        assert res.feasible
        np.testing.assert_allclose(res.coverage, [0.0, 0.0, 0.0, 1 / 7])
        np.testing.assert_allclose(res.fitness, [-25 / 7, -25 / 7])
        assert res.attacked == (3, 3)
        assert res.divergence == 0

    def test_code_4_4_breaks_budget(self, two_attacker_prepared):
        inst, order, ideal = two_attacker_prepared
        res = bitopt(inst, order, (4, 4), ideal)
        assert not res.feasible
        assert res.fitness is None and res.attacked is None and res.divergence is None
        assert res.steps == 4
        assert res.violation == pytest.approx(0.153243, abs=1e-5)

    def test_code_1_1(self, two_attacker_prepared):
        inst, order, ideal = two_attacker_prepared
        res = bitopt(inst, order, (1, 1), ideal)
        np.testing.assert_allclose(res.fitness, [-5.0, -5.0])

    def test_out_of_bounds(self, two_attacker_prepared):
        inst, order, ideal = two_attacker_prepared
        with pytest.raises(BoundsError):
            bitopt(inst, order, (0, 2), ideal)

    def test_single_attacker_top_gene_is_ideal(self):
        for seed in range(5):
            inst = generate_instance(
                BenchConfig(attackers=1, targets=6, resource_ratio=0.3, seed=seed)
            )
            order = target_order(inst)
            ideal = ideal_profile(inst, order)
            res = bitopt(inst, order, ideal.gamma_max, ideal)
            assert res.feasible
            np.testing.assert_allclose(res.coverage, ideal.ideal_cov[0], atol=1e-12)
            assert res.fitness[0] == pytest.approx(ideal.ideal_fitness[0])
            assert res.divergence == 0

    def test_feasible_results_are_consistent(self, generated_instances):
        rng = np.random.default_rng(4)
        for inst in generated_instances:
            order = target_order(inst)
            ideal = ideal_profile(inst, order)
            for _ in range(30):
                code = rng.integers(1, ideal.gamma_max + 1)
                res = bitopt(inst, order, code, ideal)
                if not res.feasible:
                    assert res.coverage.sum() > inst.budget + BUDGET_TOL
                    continue
                assert res.coverage.sum() <= inst.budget + BUDGET_TOL
                assert np.all((res.coverage >= 0) & (res.coverage <= 1))
                np.testing.assert_allclose(res.fitness, fitness(inst, res.coverage))

    def test_steps_and_operation_count(self, generated_instances):
        rng = np.random.default_rng(8)
        for inst in generated_instances:
            n, t = inst.num_attackers, inst.num_targets
            order = target_order(inst)
            ideal = ideal_profile(inst, order)
            for _ in range(30):
                code = rng.integers(1, ideal.gamma_max + 1)
                res = bitopt(inst, order, code, ideal)
                if res.feasible:
                    assert res.steps == t
                else:
                    assert 1 <= res.steps <= t
                assert alternatives(inst, order, ideal, code).work <= res.ops <= 2 * n * t


class TestOtherRestorations:
    def test_random_restoration_is_seeded(self, two_attacker_prepared):
        inst, order, ideal = two_attacker_prepared
        a = restore_random(inst, order, ideal, (3, 4), seed=11)
        b = restore_random(inst, order, ideal, (3, 4), seed=11)
        np.testing.assert_array_equal(a.coverage, b.coverage)
        assert a.feasible == b.feasible

    def test_random_restoration_picks_listed_values(self, two_attacker_prepared):
        inst, order, ideal = two_attacker_prepared
        alts = alternatives(inst, order, ideal, (2, 2))
        for seed in range(10):
            res = restore_random(inst, order, ideal, (2, 2), seed=seed)
            for t, opts in enumerate(alts.options):
                allowed = [o.value for o in opts] or [0.0]
                assert res.coverage[t] in allowed

    def test_coverage_genome_scaled_into_budget(self, two_attacker_prepared):
        inst, _, ideal = two_attacker_prepared
        res = evaluate_coverage(inst, ideal, [1.0, 1.0, 1.5, -0.2])
        np.testing.assert_allclose(res.coverage, [2 / 3, 2 / 3, 2 / 3, 0.0])
        assert res.feasible
        assert res.violation == pytest.approx(0.0)

    def test_coverage_genome_under_budget_unchanged(self, two_attacker_prepared):
        inst, _, ideal = two_attacker_prepared
        res = evaluate_coverage(inst, ideal, [0.0, 0.0, 0.0, 1 / 7])
        np.testing.assert_allclose(res.fitness, [-25 / 7, -25 / 7])


class TestExhaustiveRestoration:
    def test_candidate_values(self, two_attacker_prepared):
        inst, order, ideal = two_attacker_prepared
        alts = alternatives(inst, order, ideal, (2, 2))
        values = candidate_values(alts)
        assert len(values) == inst.num_targets
        for vals, opts in zip(values, alts.options):
            assert vals[0] == 0.0
            assert np.all(np.diff(vals) > 0)
            assert {o.value for o in opts} <= set(vals.tolist())
        assert combination_count(values) == np.prod([len(v) for v in values])

    def test_front_is_feasible_and_nondominated(self, generated_instances):
        for inst in generated_instances:
            order = target_order(inst)
            ideal = ideal_profile(inst, order)
            values = candidate_values(alternatives(inst, order, ideal, ideal.gamma_max))
            covers, fits = restore_exhaustive(inst, values)
            assert len(covers) == len(fits) > 0
            assert np.all(covers.sum(axis=1) <= inst.budget + BUDGET_TOL)
            for c, f in zip(covers, fits):
                np.testing.assert_allclose(f, fitness(inst, c), atol=1e-9)

    def test_bitopt_never_beats_exhaustive(self, generated_instances):
        rng = np.random.default_rng(9)
        for inst in generated_instances:
            order = target_order(inst)
            ideal = ideal_profile(inst, order)
            for _ in range(20):
                code = rng.integers(1, ideal.gamma_max + 1)
                res = bitopt(inst, order, code, ideal)
                if not res.feasible:
                    continue
                _, fits = restore_exhaustive(
                    inst, candidate_values(alternatives(inst, order, ideal, code))
                )
                assert np.any(np.all(fits >= res.fitness - 1e-9, axis=1))

    def test_nothing_fits_budget(self, two_attacker_instance):
        values = [np.array([1.0])] * two_attacker_instance.num_targets
        covers, fits = restore_exhaustive(two_attacker_instance, values)
        assert covers.shape == (0, 4)
        assert fits.shape == (0, 2)
