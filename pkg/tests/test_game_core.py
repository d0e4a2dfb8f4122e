"""
Tests for the game model: payoffs, best responses, fitness and dominance.
"""

import numpy as np
import pytest

from mosg_solver.game.core import (
    EPS,
    Dominance,
    GameInstance,
    attack_group,
    attack_set,
    batch_fitness,
    dominates,
    expected_attacker_payoff,
    expected_defender_payoff,
    fitness,
    pareto_indices,
    payoff_gap,
)
from mosg_solver.game.errors import (
    ArgumentError,
    InfeasibleCoverageError,
    InstanceValidationError,
    UndefinedGapError,
)

from .conftest import make_instance


@pytest.fixture
def one_target():
    return make_instance([[-4]], [[6]], [[8]], [[-2]], r=1.0)


def test_attacker_payoff_endpoints_and_midpoint(one_target):
    assert expected_attacker_payoff(one_target, 0, 0, 0.0) == 6
    assert expected_attacker_payoff(one_target, 0, 0, 1.0) == -4
    assert expected_attacker_payoff(one_target, 0, 0, 0.5) == pytest.approx(1.0)


def test_defender_payoff_interpolates(one_target):
    assert expected_defender_payoff(one_target, 0, 0, 0.0) == -2
    assert expected_defender_payoff(one_target, 0, 0, 1.0) == 8
    assert expected_defender_payoff(one_target, 0, 0, 0.25) == pytest.approx(0.5)


def test_payoff_rejects_bad_arguments(one_target):
    with pytest.raises(ArgumentError):
        expected_attacker_payoff(one_target, 1, 0, 0.5)
    with pytest.raises(ArgumentError):
        expected_defender_payoff(one_target, 0, 3, 0.5)
    with pytest.raises(ArgumentError):
        expected_attacker_payoff(one_target, 0, 0, 1.5)


def test_payoffs_monotone_in_coverage(small_instance):
    rng = np.random.default_rng(0)
    for _ in range(200):
        i = int(rng.integers(small_instance.num_attackers))
        t = int(rng.integers(small_instance.num_targets))
        lo, hi = np.sort(rng.random(2))
        if hi - lo < 1e-9:
            continue
        assert expected_attacker_payoff(small_instance, i, t, hi) < expected_attacker_payoff(
            small_instance, i, t, lo
        )
        assert expected_defender_payoff(small_instance, i, t, hi) >= expected_defender_payoff(
            small_instance, i, t, lo
        )


class TestValidation:
    def test_covered_attacker_payoff_must_be_strictly_lower(self):
        with pytest.raises(InstanceValidationError, match="strictly below"):
            make_instance([[5, -1]], [[5, 3]], 1, -1)

    def test_defender_payoffs_ordered(self):
        with pytest.raises(InstanceValidationError, match="u_cov_def"):
            make_instance(-1, [[5, 3]], [[-3, 2]], [[1, 1]])

    def test_resource_ratio_range(self):
        with pytest.raises(InstanceValidationError):
            make_instance(-1, [[5, 3]], 1, -1, r=0.0)
        with pytest.raises(InstanceValidationError):
            make_instance(-1, [[5, 3]], 1, -1, r=1.5)

    def test_shape_mismatch(self):
        with pytest.raises(InstanceValidationError, match="shape"):
            GameInstance(
                num_attackers=1,
                num_targets=3,
                resource_ratio=0.5,
                u_cov_att=[[-1, -1]],
                u_unc_att=[[1, 1]],
                u_cov_def=[[1, 1]],
                u_unc_def=[[-1, -1]],
            )

    def test_dict_round_trip(self, two_attacker_instance):
        again = GameInstance.from_dict(two_attacker_instance.to_dict())
        assert again.to_dict() == two_attacker_instance.to_dict()
        assert again.budget == 2.0

    def test_from_dict_missing_key(self, two_attacker_instance):
        data = two_attacker_instance.to_dict()
        del data["attackers"][1]["u_unc_def"]
        with pytest.raises(InstanceValidationError, match="u_unc_def"):
            GameInstance.from_dict(data)

    def test_payoffs_are_read_only(self, two_attacker_instance):
        with pytest.raises(ValueError):
            two_attacker_instance.u_unc_att[0, 0] = 100


class TestAttackSet:
    def test_zero_coverage_picks_top_target(self, two_attacker_instance):
        aset = attack_set(two_attacker_instance, 0, np.zeros(4))
        assert aset.members == (3,)
        assert aset.attacked_target == 3

    def test_tie_broken_for_defender(self):
        inst = make_instance(-1, [[5, 5, 1]], 4, [[-3, -1, -2]])
        aset = attack_set(inst, 0, np.zeros(3))
        assert aset.members == (0, 1)
        assert aset.attacked_target == 1

    def test_matches_exhaustive_scan(self, generated_instances):
        rng = np.random.default_rng(1)
        for inst in generated_instances:
            for _ in range(20):
                cover = np.minimum(rng.random(inst.num_targets) * inst.resource_ratio, 1.0)
                for i in range(inst.num_attackers):
                    ua = [
                        expected_attacker_payoff(inst, i, t, cover[t])
                        for t in range(inst.num_targets)
                    ]
                    best = max(ua)
                    expected = tuple(t for t, u in enumerate(ua) if u >= best - EPS)
                    assert attack_set(inst, i, cover).members == expected

    def test_attack_group(self, two_attacker_instance):
        cover = np.array([0.0, 0.0, 0.0, 1.0 / 7.0])
        group = attack_group(two_attacker_instance, cover)
        assert len(group) == 2
        assert group.sets[1].members == (0, 3)
        assert group.attacked_targets == (3, 3)


class TestFitness:
    def test_single_target(self, one_target):
        assert fitness(one_target, [0.4]) == pytest.approx([2.0])

    def test_zero_coverage(self, two_attacker_instance):
        np.testing.assert_allclose(fitness(two_attacker_instance, np.zeros(4)), [-5.0, -5.0])

    def test_hand_computed(self, two_attacker_instance):
        cover = np.array([0.0, 0.0, 0.0, 1.0 / 7.0])
        np.testing.assert_allclose(fitness(two_attacker_instance, cover), [-25.0 / 7, -25.0 / 7])

    def test_infeasible_raises(self, two_attacker_instance):
        with pytest.raises(InfeasibleCoverageError) as info:
            fitness(two_attacker_instance, [1.0, 1.0, 0.5, 0.0])
        assert info.value.violation == pytest.approx(0.5)

    def test_batch_matches_single(self, generated_instances):
        rng = np.random.default_rng(2)
        for inst in generated_instances:
            covers = rng.random((15, inst.num_targets)) * inst.resource_ratio
            batch = batch_fitness(inst, covers)
            single = np.array([fitness(inst, c) for c in covers])
            np.testing.assert_allclose(batch, single)


class TestDominance:
    def test_relations(self):
        assert dominates((2, 2), (1, 1)) is Dominance.DOMINATES
        assert dominates((2, 1), (1, 2)) is Dominance.INCOMPARABLE
        assert dominates((2, 2), (2, 2)) is Dominance.EQUAL
        assert dominates((1, 1), (2, 2)) is Dominance.DOMINATED

    def test_weak(self):
        assert dominates((2, 2), (2, 2)).weak
        assert dominates((2, 3), (2, 2)).weak
        assert not dominates((2, 1), (1, 2)).weak

    def test_tolerance(self):
        assert dominates((1.0, 1.0), (1.0 + 1e-12, 1.0), tol=1e-9) is Dominance.EQUAL

    def test_length_mismatch(self):
        with pytest.raises(ArgumentError):
            dominates((1, 2), (1, 2, 3))

    def test_pareto_indices(self):
        points = np.array([[1, 2], [2, 1], [0, 0], [2, 1]])
        assert pareto_indices(points).tolist() == [0, 1]
        assert pareto_indices(np.empty((0, 2))).tolist() == []


class TestPayoffGap:
    def test_direct_subtraction(self):
        inst = make_instance(-1, [[5, 5]], 4, [[3, 1]])
        assert payoff_gap(inst, 0, np.zeros(2), 0) == pytest.approx(2.0)

    def test_equal_payoffs(self):
        inst = make_instance(-1, [[5, 5]], 4, [[1, 1]])
        assert payoff_gap(inst, 0, np.zeros(2), 0) == 0.0

    def test_single_member_undefined(self, two_attacker_instance):
        with pytest.raises(UndefinedGapError):
            payoff_gap(two_attacker_instance, 0, np.zeros(4), 3)

    def test_non_member_rejected(self):
        inst = make_instance(-1, [[5, 5, 1]], 4, [[3, 1, 0]])
        with pytest.raises(ArgumentError):
            payoff_gap(inst, 0, np.zeros(3), 2)
