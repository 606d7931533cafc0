import math

import numpy as np
import pytest

from onlineload.olo import (EGPlusMinus, PnormLearner, RegretMeter, default_eta, eg_init,
                            eg_predict, eg_regret_bound, eg_update, pnorm_init, pnorm_predict,
                            pnorm_update)
from onlineload.olo import EgState


def test_init():
    s = eg_init(2, 0.1)
    np.testing.assert_allclose(s.w_plus, [0.25, 0.25])
    np.testing.assert_allclose(s.w_minus, [0.25, 0.25])
    s1 = eg_init(1, 0.1)
    np.testing.assert_allclose(s1.w_plus, [0.5])
    np.testing.assert_array_equal(eg_predict(s), [0, 0])
    with pytest.raises(ValueError):
        eg_init(0, 0.1)
    with pytest.raises(ValueError):
        eg_init(2, 0.0)


def test_predict_example():
    s = EgState(np.log([0.7, 1e-300, 1e-300, 0.3]), 0.1)
    w = eg_predict(s)
    np.testing.assert_allclose(w, [0.7, -0.3])
    assert np.abs(w).sum() == pytest.approx(1.0)


def test_update_examples():
    s = eg_init(3, 0.5)
    same = eg_update(s, np.zeros(3))
    np.testing.assert_allclose(same.log_w, s.log_w, atol=1e-15)

    s = eg_update(eg_init(1, 1.0), [1.0])
    # independent scalar computation
    plus = 0.5 * math.exp(-1) / (0.5 * math.exp(-1) + 0.5 * math.exp(1))
    assert s.w_plus[0] == pytest.approx(plus, abs=1e-15)
    assert s.w_plus[0] == pytest.approx(0.11920, abs=1e-5)
    assert s.w_minus[0] == pytest.approx(0.88080, abs=1e-5)


def test_update_matches_literal_multiplicative_form(rng):
    d, eta = 4, 0.3
    s = eg_init(d, eta)
    wp = np.full(d, 1 / (2 * d))
    wm = np.full(d, 1 / (2 * d))
    for _ in range(50):
        g = rng.uniform(-1, 1, d)
        z = np.sum(wp * np.exp(-eta * g) + wm * np.exp(eta * g))
        wp, wm = wp * np.exp(-eta * g) / z, wm * np.exp(eta * g) / z
        s = eg_update(s, g)
        np.testing.assert_allclose(s.w_plus, wp, rtol=1e-10)
        np.testing.assert_allclose(s.w_minus, wm, rtol=1e-10)


def test_normalization_and_ball(rng):
    s = eg_init(5, 0.7)
    for _ in range(2000):
        s = eg_update(s, rng.choice([-1.0, 1.0], 5) * rng.uniform(0, 1, 5))
        assert s.w_plus.sum() + s.w_minus.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.abs(eg_predict(s)).sum() <= 1 + 1e-12


def test_update_rejects_out_of_range_cost():
    with pytest.raises(ValueError):
        eg_update(eg_init(2, 0.1), [1.5, 0])
    with pytest.raises(ValueError):
        eg_update(eg_init(2, 0.1), [0.5])


def test_default_eta_and_bound():
    assert default_eta(2, 10_000, 1) == pytest.approx(math.sqrt(2 * math.log(4) / 10_000))
    assert default_eta(2, 10_000, 1) == pytest.approx(0.016651, abs=1e-6)
    assert default_eta(2, 10_000, 2) == pytest.approx(default_eta(2, 10_000, 1) / 2)
    assert default_eta(2, 40_000) == pytest.approx(default_eta(2, 10_000) / 2)
    assert eg_regret_bound(2, 10_000) == pytest.approx(166.51, abs=1e-2)
    assert eg_regret_bound(2, 0) == 0.0
    assert eg_regret_bound(3, 100) > eg_regret_bound(2, 100)
    assert eg_regret_bound(2, 101) > eg_regret_bound(2, 100)
    assert eg_regret_bound(2, 100, 2.0) > eg_regret_bound(2, 100, 1.0)


def test_determinism(rng):
    costs = rng.uniform(-1, 1, (500, 6))
    runs = []
    for _ in range(2):
        s = eg_init(6, 0.05)
        traj = []
        for g in costs:
            traj.append(eg_predict(s))
            s = eg_update(s, g)
        runs.append(np.array(traj))
    assert np.array_equal(runs[0], runs[1])


def test_regret_meter_comparator_is_signed_vertex(rng):
    d = 3
    costs = rng.uniform(-1, 1, (40, d))
    meter = RegretMeter(d)
    for g in costs:
        meter.record(np.zeros(d), g)
    vertices = np.concatenate([np.eye(d), -np.eye(d)])
    brute = min(float(costs.sum(axis=0) @ v) for v in vertices)
    assert meter.comparator_loss == pytest.approx(brute)


@pytest.mark.slow
def test_no_frozen_coordinates_after_many_extreme_updates():
    d = 2
    learner = EGPlusMinus(d, 1.0)
    g = np.array([1.0, -1.0])
    for _ in range(1_000_000):
        learner.update(g)
    assert np.all(np.isfinite(learner.state.log_w))
    gap = learner.state.log_w[1] - learner.state.log_w[0]
    assert gap == pytest.approx(2.0 * 1_000_000, rel=1e-9)
    # the flipped sign keeps moving the starved copies: nothing is frozen at -inf
    for _ in range(50):
        learner.update(-g)
    new_gap = learner.state.log_w[1] - learner.state.log_w[0]
    assert gap - new_gap == pytest.approx(100.0, rel=1e-6)


def test_extreme_updates_stay_finite_fast():
    learner = EGPlusMinus(3, 5.0)
    for _ in range(20_000):
        learner.update(np.array([1.0, -1.0, 1.0]))
    assert np.all(np.isfinite(learner.state.log_w))
    for _ in range(40_000):
        learner.update(np.array([-1.0, 1.0, -1.0]))
    w = learner.predict()
    assert np.isfinite(w).all() and np.abs(w).sum() == pytest.approx(1.0)


def test_pnorm_predict_examples():
    s = pnorm_init(3, 3.0, 0.5)
    np.testing.assert_array_equal(pnorm_predict(s), np.zeros(3))
    s2 = pnorm_update(pnorm_init(2, 3.0, 0.5), [-1.0, -1.0])
    np.testing.assert_allclose(pnorm_predict(s2), 0.5 * 2 ** (-1 / 3) * np.ones(2))
    flat = pnorm_update(pnorm_init(3, 2.0, 0.7), [0.2, -0.5, 0.1])
    np.testing.assert_allclose(pnorm_predict(flat), 0.7 * flat.theta)


def test_pnorm_theta_tracks_negated_costs(rng):
    s = pnorm_init(4, 3.0, 0.1)
    costs = rng.uniform(-1, 1, (100, 4))
    for g in costs:
        s = pnorm_update(s, g)
    np.testing.assert_allclose(s.theta, -costs.sum(axis=0), atol=1e-9)


def test_pnorm_learner_clips_into_ball(rng):
    learner = PnormLearner(3, 4.0, eta=1.0)
    for _ in range(50):
        w = learner.predict()
        assert np.abs(w).sum() <= 1 + 1e-12
        learner.update(rng.uniform(-1, 1, 3))
    assert learner.clip_count > 0
