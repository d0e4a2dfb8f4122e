"""
Tests for hypervolume, IGD+ and reference-front scoring.
"""

import itertools
import math

import numpy as np
import pytest

from mosg_solver.game.errors import ArgumentError
from mosg_solver.metrics import (
    build_reference,
    fixed_reference_point,
    hypervolume,
    hypervolume_estimate,
    igd_plus,
    score_front,
)


def _inclusion_exclusion(points, ref):
    total = 0.0
    for size in range(1, len(points) + 1):
        for subset in itertools.combinations(points, size):
            corner = np.max(subset, axis=0)
            total += (-1) ** (size + 1) * float(np.prod(np.maximum(ref - corner, 0.0)))
    return total


class TestHypervolume:
    def test_single_point(self):
        assert hypervolume([[1.0, 1.0]], [3.0, 3.0]) == pytest.approx(4.0)

    def test_two_dimensional_staircase(self):
        assert hypervolume([[1.0, 2.0], [2.0, 1.0]], [3.0, 3.0]) == pytest.approx(3.0)

    def test_overlapping_boxes_counted_once(self):
        assert hypervolume([[1.0, 3.0], [3.0, 1.0]], [4.0, 4.0]) == pytest.approx(5.0)

    def test_three_dimensional_overlap(self):
        front = [[0.0, 1.0, 1.0], [1.0, 0.0, 1.0]]
        assert hypervolume(front, [2.0, 2.0, 2.0]) == pytest.approx(3.0)

    def test_maximize_orientation(self):
        assert hypervolume([[-1.0, -1.0]], [-3.0, -3.0], maximize=True) == pytest.approx(4.0)

    @pytest.mark.parametrize("dim", [3, 4, 5])
    def test_matches_inclusion_exclusion(self, dim):
        rng = np.random.default_rng(dim)
        for _ in range(10):
            front = rng.random((6, dim))
            ref = np.full(dim, 1.2)
            assert hypervolume(front, ref) == pytest.approx(_inclusion_exclusion(front, ref))

    def test_adding_a_point_never_shrinks(self):
        rng = np.random.default_rng(7)
        front = rng.random((5, 3))
        ref = np.ones(3) * 1.5
        base = hypervolume(front, ref)
        for _ in range(20):
            grown = np.vstack([front, rng.random((1, 3))])
            assert hypervolume(grown, ref) >= base - 1e-12

    def test_points_beyond_reference_dropped(self, caplog):
        with caplog.at_level("WARNING"):
            value = hypervolume([[1.0, 1.0], [4.0, 0.0]], [3.0, 3.0])
        assert value == pytest.approx(4.0)
        assert "Dropped 1 points" in caplog.text

    def test_empty_front(self):
        assert hypervolume(np.empty((0, 2)), [1.0, 1.0]) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(ArgumentError):
            hypervolume([[1.0, 1.0]], [2.0, 2.0, 2.0])

    def test_monte_carlo_close_to_exact(self):
        front = np.random.default_rng(3).random((6, 3))
        ref = np.full(3, 1.1)
        estimate, stderr = hypervolume_estimate(front, ref, samples=200_000, seed=1)
        assert abs(estimate - hypervolume(front, ref)) <= 4 * stderr + 1e-3

    def test_many_objectives_use_sampling(self):
        assert hypervolume(np.zeros((1, 9)), np.ones(9), samples=1000) == pytest.approx(1.0)


class TestIGDPlus:
    def test_single_pair(self):
        assert igd_plus([[1.0, 1.0]], [[0.0, 0.0]]) == pytest.approx(math.sqrt(2))

    def test_better_coordinates_ignored(self):
        assert igd_plus([[0.0, 2.0]], [[1.0, 1.0]]) == pytest.approx(1.0)

    def test_averaged_over_reference(self):
        value = igd_plus([[1.0, 1.0]], [[0.0, 0.0], [1.0, 1.0]])
        assert value == pytest.approx(math.sqrt(2) / 2)

    def test_zero_when_front_covers_reference(self):
        ref = [[0.0, 1.0], [1.0, 0.0]]
        assert igd_plus(ref, ref) == 0.0

    def test_maximize(self):
        assert igd_plus([[-1.0, -1.0]], [[0.0, 0.0]], maximize=True) == pytest.approx(math.sqrt(2))

    def test_empty_raises(self):
        with pytest.raises(ArgumentError):
            igd_plus(np.empty((0, 2)), [[0.0, 0.0]])
        with pytest.raises(ArgumentError):
            igd_plus([[0.0, 0.0]], [])


class TestReferenceFront:
    def test_pooled_front_and_reference_point(self):
        reference = build_reference([[[1.0, 2.0]], [[2.0, 1.0]], [[0.0, 0.0]]])
        assert sorted(map(tuple, reference.points)) == [(-2.0, -1.0), (-1.0, -2.0)]
        np.testing.assert_array_equal(reference.ref_point, [1.0, 1.0])

    def test_score_front(self):
        reference = build_reference([[[1.0, 2.0]], [[2.0, 1.0]]])
        hv, igd = score_front([[1.0, 2.0]], reference)
        assert hv == pytest.approx(2.0)
        assert igd == pytest.approx(0.5)

    def test_score_empty_front(self):
        reference = build_reference([[[1.0, 2.0]]])
        hv, igd = score_front(np.empty((0, 2)), reference)
        assert hv == 0.0 and math.isnan(igd)

    def test_nothing_to_pool(self):
        with pytest.raises(ArgumentError):
            build_reference([np.empty((0, 2))])

    def test_fixed_reference_point(self):
        np.testing.assert_array_equal(fixed_reference_point([-5.0, -3.0]), [6.0, 4.0])
