import itertools

import numpy as np
import pytest

from onlineload.allocation import (DualWeight, compute_allocation, game_value,
                                   grid_allocation_oracle, simplex_grid, worst_case_load)
from onlineload.support import h_value

from conftest import random_w


def corner_max(w, alpha):
    """max over l in {0,1}^K of <w, (alpha*l, l)>; the inner problem is linear in l."""
    best = -np.inf
    for l in itertools.product([0.0, 1.0], repeat=w.k):
        l = np.array(l)
        best = max(best, float(w.w1 @ (alpha * l) + w.w2 @ l))
    return best


def test_game_value_examples():
    assert game_value(DualWeight([1, 1], [0, 0]), [0.5, 0.5]) == 1.0
    for alpha in ([1, 0], [0.3, 0.7]):
        assert game_value(DualWeight([-1, 0], [0, 0]), alpha) == 0.0
    w = DualWeight([-1, 1], [1, 0])
    assert game_value(w, [1, 0]) == 0.0
    assert corner_max(w, np.array([1.0, 0.0])) == 0.0


def test_game_value_matches_corner_enumeration(rng):
    for _ in range(200):
        k = int(rng.integers(1, 5))
        w = random_w(rng, k)
        alpha = rng.dirichlet(np.ones(k))
        assert game_value(w, alpha) == pytest.approx(corner_max(w, alpha), abs=1e-12)
        l = worst_case_load(w, alpha)
        assert set(np.unique(l)) <= {0.0, 1.0}
        assert float(w.w1 @ (alpha * l) + w.w2 @ l) == pytest.approx(game_value(w, alpha))


def test_worst_case_load_examples():
    np.testing.assert_array_equal(worst_case_load(DualWeight([1, 1], [0, 0]), [0.5, 0.5]), [1, 1])
    np.testing.assert_array_equal(worst_case_load(DualWeight([-1, -1], [0, 0]), [0.5, 0.5]), [0, 0])
    w = DualWeight([1, -1], [-0.2, 0.3])
    # both terms are non-positive: 0.1 - 0.2 and -0.9 + 0.3
    np.testing.assert_array_equal(worst_case_load(w, [0.1, 0.9]), [0, 0])
    assert corner_max(w, np.array([0.1, 0.9])) == 0.0


def test_compute_allocation_examples():
    res = compute_allocation(DualWeight([0, 0], [0.3, -0.3]))
    assert res.value == pytest.approx(0.3)

    w = DualWeight(np.array([2.0, 1.0]) / 3, [0, 0])
    assert grid_allocation_oracle(w).value == pytest.approx(1 / 3, abs=1e-3)
    res = compute_allocation(w)
    np.testing.assert_allclose(res.alpha, [0, 1])
    assert res.value == pytest.approx(1 / 3)

    w = DualWeight([-0.5, 0.5], [0.5, 0])
    res = compute_allocation(w)
    np.testing.assert_allclose(res.alpha, [1, 0])
    assert res.value == 0.0
    assert grid_allocation_oracle(w).value == 0.0


def test_zero_direction_gives_uniform():
    res = compute_allocation(DualWeight(np.zeros(4), np.zeros(4)))
    np.testing.assert_allclose(res.alpha, np.full(4, 0.25))
    assert res.value == 0.0


def test_grid_oracle_examples():
    assert grid_allocation_oracle(DualWeight([0, 0, 0], [0, 0, 0]), 1e-2).value == 0.0
    w = DualWeight([1, 1], [0, 0])
    grid = simplex_grid(2, 1e-2)
    assert np.allclose([game_value(w, a) for a in grid], 1.0)
    with pytest.raises(ValueError):
        grid_allocation_oracle(DualWeight(np.ones(5) / 5, np.zeros(5)))


@pytest.mark.parametrize("k", [2, 3])
def test_allocation_vs_grid_and_lp(rng, k):
    for _ in range(100):
        w = random_w(rng, k)
        res = compute_allocation(w)
        assert res.alpha.min() >= 0 and abs(res.alpha.sum() - 1) <= 1e-12
        assert res.value == pytest.approx(game_value(w, res.alpha), abs=1e-12)
        grid = grid_allocation_oracle(w, 1e-3).value
        assert grid - k * 1e-3 <= res.value <= grid + 1e-9
        assert compute_allocation(w, method="lp").value == pytest.approx(res.value, abs=1e-9)


def test_allocation_larger_k_vs_lp(rng):
    for _ in range(50):
        w = random_w(rng, 12)
        assert compute_allocation(w).value == pytest.approx(
            compute_allocation(w, method="lp").value, abs=1e-9)


def test_allocation_scale_covariance(rng):
    for _ in range(200):
        w = random_w(rng, int(rng.integers(2, 6)))
        c = float(rng.uniform(0.05, 1.0))
        scaled = compute_allocation(w.scaled(c))
        assert game_value(w, scaled.alpha) == pytest.approx(compute_allocation(w).value, abs=1e-9)
        assert scaled.value == pytest.approx(c * compute_allocation(w).value, abs=1e-9)


def test_allocation_respects_blackwell_condition(rng):
    for _ in range(300):
        w = random_w(rng, int(rng.integers(2, 8)))
        assert compute_allocation(w).value <= h_value(w) + 1e-6


def test_tie_break_is_lowest_index():
    res = compute_allocation(DualWeight([0.5, 0.5], [0, 0]))
    np.testing.assert_array_equal(res.alpha, [1, 0])


def test_dual_weight_validation():
    with pytest.raises(ValueError):
        DualWeight([1, 2], [1])
    with pytest.raises(ValueError):
        DualWeight([0.9, 0.9], [0, 0]).check()
    DualWeight([0.5, -0.5], [0.2, 0.8]).check()
    np.testing.assert_array_equal(DualWeight.from_flat([1, 2, 3, 4]).w2, [3, 4])
