"""Control process: threshold logic, ordering, resizing, sentinel."""

import numpy as np
import pytest

from rollmc import ControlConfig, ControlState, control_step, quality

CFG = ControlConfig(
    beta1=0.01, beta2=0.0125, gamma1=0.1, gamma2=0.75, n_min=1000, n_max_init=20000
)
ON = ControlState(sampler_on=True, n_max=10000)
OFF = ControlState(sampler_on=False, n_max=10000)


class TestQuality:
    def test_ratio(self):
        assert quality(5000.0, 20000) == pytest.approx(0.25)
        assert quality(0.0, 100) == 0.0

    def test_validation(self):
        with pytest.raises(ValueError):
            quality(-1.0, 100)
        with pytest.raises(ValueError):
            quality(1.0, 0)


class TestControlStep:
    def test_pause_on_low_accuracy(self):
        state, actions = control_step(0.005, 0.5, 2000, ON, CFG)
        assert actions == ("pause",)
        assert state == ControlState(False, 10000)

    def test_no_pause_below_min_count(self):
        state, actions = control_step(0.005, 0.5, 999, ON, CFG)
        assert actions == ()
        assert state.sampler_on

    def test_resume_on_high_accuracy(self):
        state, actions = control_step(0.02, 0.5, 2000, OFF, CFG)
        assert actions == ("resume",)
        assert state.sampler_on

    def test_resume_when_quality_floor_reached(self):
        # paused, in the accuracy dead band, quality poor, at the floor size
        state, actions = control_step(0.011, 0.05, 1000, OFF, CFG)
        assert actions == ("resume",)
        assert state.sampler_on

    def test_shrink_when_paused_with_poor_quality(self):
        state, actions = control_step(0.011, 0.05, 5000, OFF, CFG)
        assert actions == ("shrink",)
        assert state == ControlState(False, 9000)

    def test_grow_when_running_with_high_quality(self):
        state, actions = control_step(0.011, 0.8, 5000, ON, CFG)
        assert actions == ("grow",)
        assert state == ControlState(True, 11000)

    def test_dead_band_is_a_noop(self):
        state, actions = control_step(0.011, 0.5, 5000, ON, CFG)
        assert actions == ()
        assert state == ON

    def test_pause_then_shrink_in_one_step(self):
        state, actions = control_step(0.005, 0.05, 5000, ON, CFG)
        assert actions == ("pause", "shrink")
        assert state == ControlState(False, 9000)

    def test_pause_then_resume_flip_at_floor(self):
        state, actions = control_step(0.005, 0.05, 1000, ON, CFG)
        assert actions == ("pause", "resume")
        assert state.sampler_on

    def test_resume_then_grow(self):
        state, actions = control_step(0.02, 0.8, 5000, OFF, CFG)
        assert actions == ("resume", "grow")
        assert state == ControlState(True, 11000)

    def test_sentinel_replenishes(self):
        state, actions = control_step(-1.0, 0.9, 5000, OFF, CFG)
        assert actions == ("replenish",)
        assert state == ControlState(True, CFG.n_min)

    def test_shrink_clamps_at_floor(self):
        state, _ = control_step(0.011, 0.05, 1050, ControlState(False, 1050), CFG)
        assert state.n_max == CFG.n_min

    def test_resize_rounding(self):
        # floor on shrink, ceil on grow
        state, _ = control_step(0.011, 0.05, 2000, ControlState(False, 10015), CFG)
        assert state.n_max == 9013  # floor(10015 * 0.9)
        state, _ = control_step(0.011, 0.8, 2000, ControlState(True, 10015), CFG)
        assert state.n_max == 11017  # ceil(10015 * 1.1)

    def test_is_pure(self):
        a = control_step(0.011, 0.05, 5000, OFF, CFG)
        b = control_step(0.011, 0.05, 5000, OFF, CFG)
        assert a == b
        assert OFF == ControlState(sampler_on=False, n_max=10000)

    def test_invalid_accuracy_rejected(self):
        with pytest.raises(ValueError):
            control_step(-0.5, 0.5, 100, ON, CFG)
        with pytest.raises(ValueError):
            control_step(float("nan"), 0.5, 100, ON, CFG)


class TestControlConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            ControlConfig(beta1=0.02, beta2=0.01)
        with pytest.raises(ValueError):
            ControlConfig(gamma1=0.9, gamma2=0.5)
        with pytest.raises(ValueError):
            ControlConfig(n_min=100, n_max_init=50)
        with pytest.raises(ValueError):
            ControlConfig(resize_fraction=0.0)
