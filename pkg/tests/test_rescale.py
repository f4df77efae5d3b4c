import numpy as np
import pytest

from driftwatch.errors import ConfigError, InputError
from driftwatch.rescale import RollingWindow, rescale_score, sample_std


def test_sample_std_exact():
    assert sample_std([1.0, 2.0, 3.0]) == 1.0


def test_sample_std_requires_two():
    with pytest.raises(InputError):
        sample_std([1.0])


def test_rescale_basic():
    # |2 - 0| / (1 * 2) = 1.0 exactly
    assert rescale_score(2.0, 0.0, sigma=2.0, k=1.0) == 1.0
    assert rescale_score(1.0, 0.0, sigma=2.0, k=1.0) == 0.5
    assert rescale_score(5.0, 5.0, sigma=0.3) == 0.0


def test_rescale_caps_at_one():
    assert rescale_score(100.0, 0.0, sigma=0.5) == 1.0


def test_sigma_floor_prevents_division_blowup():
    # zero volatility: any nonzero gap saturates instead of dividing by zero
    assert rescale_score(1.0, 0.0, sigma=0.0) == 1.0
    assert rescale_score(0.0, 0.0, sigma=0.0) == 0.0


def test_k_scales_the_denominator():
    assert rescale_score(1.0, 0.0, sigma=1.0, k=2.0) == 0.5
    with pytest.raises(ConfigError):
        rescale_score(1.0, 0.0, sigma=1.0, k=0.0)


def test_negative_sigma_rejected():
    with pytest.raises(InputError):
        rescale_score(1.0, 0.0, sigma=-1.0)


class TestRollingWindow:
    def test_warm_up_flagging(self):
        w = RollingWindow(5)
        assert not w.warmed_up
        w.push(1.0)
        assert not w.warmed_up
        w.push(2.0)
        assert w.warmed_up

    def test_std_matches_numpy_over_window(self):
        w = RollingWindow(4)
        data = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0]
        for v in data:
            w.push(v)
        # only the last 4 observations remain
        assert len(w) == 4
        assert w.std() == pytest.approx(np.std(data[-4:], ddof=1))

    def test_std_before_warm_up_rejected(self):
        w = RollingWindow(3)
        w.push(1.0)
        with pytest.raises(InputError):
            w.std()

    def test_min_size(self):
        with pytest.raises(ConfigError):
            RollingWindow(1)

    def test_load_values_roundtrip(self):
        w = RollingWindow(4)
        w.load_values([1.0, 2.0, 3.0])
        assert w.values().tolist() == [1.0, 2.0, 3.0]
        with pytest.raises(InputError):
            w.load_values([1.0] * 5)
