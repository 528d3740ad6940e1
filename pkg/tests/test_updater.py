"""Update process: reweight-and-scale, transitions, dispatch."""

import numpy as np
import pytest

from rollmc import (
    ContractViolationError,
    DegenerateWeightsError,
    SampleDatabase,
    TargetStep,
    alpha_combined_estimate,
    apply_target_change,
    effective_sample_size,
    reweight_and_scale,
    weighted_estimate,
)
from rollmc.targets import ModelPlugin


class ScalarModel(ModelPlugin):
    """1-d stub: log increment is value-dependent, transition appends a copy."""

    name = "stub"

    def __init__(self):
        self._dim = 1
        self._step = TargetStep(1, 1, 1)

    @property
    def sample_dimension(self):
        return self._dim

    @property
    def estimand_dimension(self):
        return 1

    def current_step(self):
        return self._step

    def advance(self, step, payload):
        self._step = step
        if step.requires_transition:
            self._dim += 1

    def initial_value(self, rng):
        return np.zeros(self._dim)

    def mcmc_steps(self, value, n_steps, rng):
        return value

    def log_incremental_weight(self, value, payload):
        return float(payload * value[0])

    def transition(self, value, rng):
        return np.concatenate([value, [value[0] + 1.0]])

    def estimand(self, value, key):
        return value[:1]


class TestReweightAndScale:
    def test_hand_example(self):
        # unit weights times (0.2, 0.6): scale = 0.8 / 0.4 = 2 -> (0.4, 1.2)
        out = reweight_and_scale(np.ones(2), np.log([0.2, 0.6]))
        np.testing.assert_allclose(out, [0.4, 1.2], rtol=1e-12)

    def test_sum_equals_ess(self):
        rng = np.random.default_rng(1)
        for _ in range(300):
            w = rng.exponential(size=rng.integers(2, 60))
            lv = rng.normal(scale=3.0, size=len(w))
            out = reweight_and_scale(w, lv)
            assert np.sum(out) == pytest.approx(effective_sample_size(out), rel=1e-9)

    def test_shift_invariance(self):
        rng = np.random.default_rng(2)
        w = rng.exponential(size=30)
        lv = rng.normal(size=30)
        a = reweight_and_scale(w, lv)
        b = reweight_and_scale(w, lv - 700.0)
        np.testing.assert_allclose(a, b, rtol=1e-9)

    def test_zero_weights_stay_zero(self):
        out = reweight_and_scale(np.array([0.0, 1.0, 2.0]), np.zeros(3))
        assert out[0] == 0.0
        assert np.all(out[1:] > 0)

    def test_minus_inf_increment_kills_a_sample(self):
        out = reweight_and_scale(np.ones(3), np.array([0.0, -np.inf, 0.0]))
        assert out[1] == 0.0

    def test_tiny_weights_clamp_to_zero(self):
        out = reweight_and_scale(np.ones(2), np.array([-800.0, 0.0]))
        assert out[0] == 0.0

    def test_degenerate_raises(self):
        with pytest.raises(DegenerateWeightsError):
            reweight_and_scale(np.zeros(3), np.zeros(3))
        with pytest.raises(DegenerateWeightsError):
            reweight_and_scale(np.ones(2), np.array([-np.inf, -np.inf]))

    def test_invalid_increments_raise(self):
        with pytest.raises(ValueError):
            reweight_and_scale(np.ones(2), np.array([np.nan, 0.0]))
        with pytest.raises(ValueError):
            reweight_and_scale(np.ones(2), np.array([np.inf, 0.0]))


def _store_with(values, weights, cutoffs, n_max=100, target=1):
    db = SampleDatabase(n_max=n_max)
    db.insert_batch(
        np.asarray(values, dtype=float),
        np.asarray(weights, dtype=float),
        np.arange(len(weights), dtype=np.int64),
        np.asarray(cutoffs, dtype=np.int64),
    )
    db.set_target_index(target)
    return db


class TestApplyTargetChange:
    def test_reweight_path_matches_bayes_oracle(self):
        # two point masses at 1 and 2 with payload 0.5:
        # unnormalized new weights prop to exp(0.5), exp(1.0)
        model = ScalarModel()
        db = _store_with([[1.0], [2.0]], [1.0, 1.0], [1, 1])
        step = TargetStep(2, 1, 1)
        model.advance(step, 0.5)
        out = apply_target_change(db, model, step, 0.5, np.random.default_rng(0))
        w = db.snapshot().weights
        np.testing.assert_allclose(w[1] / w[0], np.exp(0.5), rtol=1e-12)
        assert out.kind == "reweighted"
        assert out.n_updated == 2
        assert db.target_index == 2
        assert np.sum(w) == pytest.approx(effective_sample_size(w), rel=1e-9)

    def test_fresh_records_are_excluded(self):
        model = ScalarModel()
        db = _store_with([[1.0], [2.0], [3.0]], [1.0, 1.0, 1.0], [1, 1, 2])
        step = TargetStep(2, 1, 1)
        model.advance(step, 1.0)
        out = apply_target_change(db, model, step, 1.0, np.random.default_rng(0))
        w = db.snapshot().weights
        assert w[2] == 1.0  # produced against target 2 already
        assert out.n_updated == 2

    def test_transition_path(self):
        model = ScalarModel()
        db = _store_with([[1.0], [2.0]], [0.5, 1.5], [1, 1])
        step = TargetStep(2, 0, 2)
        model.advance(step, None)
        out = apply_target_change(db, model, step, None, np.random.default_rng(0))
        snap = db.snapshot()
        assert out.kind == "transited"
        assert out.ess_before == out.ess_after
        np.testing.assert_array_equal(snap.weights, [0.5, 1.5])
        np.testing.assert_allclose(snap.values, [[1.0, 2.0], [2.0, 3.0]])

    def test_non_successor_target_rejected(self):
        model = ScalarModel()
        db = _store_with([[1.0]], [1.0], [1])
        with pytest.raises(ContractViolationError):
            apply_target_change(db, model, TargetStep(3, 1, 1), 1.0, np.random.default_rng(0))


class TestAlphaCombination:
    def test_matches_pooled_estimate(self):
        rng = np.random.default_rng(9)
        for _ in range(200):
            m, n_new = rng.integers(2, 40), int(rng.integers(1, 40))
            old_w = reweight_and_scale(
                rng.exponential(size=m), rng.normal(scale=2.0, size=m)
            )
            g_old = rng.normal(size=(m, 2))
            g_new = rng.normal(size=(n_new, 2))
            pooled = weighted_estimate(
                np.concatenate([old_w, np.ones(n_new)]), np.vstack([g_old, g_new])
            )
            combined = alpha_combined_estimate(
                effective_sample_size(old_w),
                weighted_estimate(old_w, g_old),
                n_new,
                weighted_estimate(np.ones(n_new), g_new),
            )
            np.testing.assert_allclose(combined, pooled, rtol=1e-12, atol=1e-12)
