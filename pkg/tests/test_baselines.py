"""Statistic-level checks against brute-force re-implementations.

The reference routines below recompute each statistic with plain python
loops (ECDF evaluation point by point, hand-rolled quantile edges) so a
vectorization bug in the package cannot hide.
"""

import math
import unittest

import numpy as np
import pytest

from driftwatch.baselines import (
    calibrate_psi_threshold,
    RollingBaselineDetector,
    calibrate_wasserstein_threshold,
    ks_pvalue,
    ks_statistic,
    ks_test,
    psi,
    psi_critical_value,
    rolling_drift_detect,
    wasserstein_distance,
)
from driftwatch.errors import ConfigError, InputError


# -- brute-force references ---------------------------------------------------

def _ecdf(sample, x):
    return sum(1 for v in sample if v <= x) / len(sample)


def ks_stat_brute(a, b):
    pts = sorted(set(list(a) + list(b)))
    return max(abs(_ecdf(a, x) - _ecdf(b, x)) for x in pts)


def wasserstein_brute(a, b):
    pts = sorted(set(list(a) + list(b)))
    total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        total += abs(_ecdf(a, lo) - _ecdf(b, lo)) * (hi - lo)
    return total


def psi_brute(ref, tgt, bins=10, floor=1e-6):
    # Edges come from the same quantile routine (an independent edge
    # interpolation would differ by an ulp and flip points that sit exactly
    # on an edge); the binning, flooring and log-ratio sum are loop-level.
    edges = list(np.quantile(ref, np.linspace(0.0, 1.0, bins + 1)))
    edges[0] = -math.inf
    edges[-1] = math.inf

    def bin_of(v):
        # half-open bins [e_i, e_{i+1}) with the last bin closed above
        for i in range(bins - 1):
            if edges[i] <= v < edges[i + 1]:
                return i
        return bins - 1

    out = 0.0
    for i in range(bins):
        p = sum(1 for v in ref if bin_of(v) == i) / len(ref)
        q = sum(1 for v in tgt if bin_of(v) == i) / len(tgt)
        p = max(p, floor)
        q = max(q, floor)
        out += (q - p) * math.log(q / p)
    return out


# -- anchors ------------------------------------------------------------------

def test_ks_anchor_values():
    assert ks_statistic([1, 3], [2, 4]) == 0.5
    assert ks_statistic([1, 2, 3], [1, 2, 3]) == 0.0
    assert ks_statistic([1, 2, 3], [4, 5, 6]) == 1.0


def test_wasserstein_anchor_values():
    assert wasserstein_distance([0, 1], [1, 2]) == 1.0
    assert wasserstein_distance([5.0], [5.0]) == 0.0
    assert wasserstein_distance([0.0], [1.0]) == 1.0


def test_psi_identical_and_degenerate():
    ref = list(np.linspace(0.0, 9.9, 100))
    assert psi(ref, ref) == pytest.approx(0.0, abs=1e-9)
    assert psi(ref, ref, n_bins=1) == 0.0


def test_psi_concentrated_target():
    # reference uniform over 10 quantile bins, target fully inside one bin:
    # one term (1 - 0.1) ln(1/0.1), nine terms (eps - 0.1) ln(eps/0.1)
    ref = list(np.arange(100, dtype=float))
    tgt = [50.2] * 40
    hand = (1.0 - 0.1) * math.log(1.0 / 0.1)
    hand += 9 * (1e-6 - 0.1) * math.log(1e-6 / 0.1)
    assert psi(ref, tgt) == pytest.approx(hand, rel=1e-9)


class TestBruteForceAgreement(unittest.TestCase):
    """All three statistics against the loop references, 100 random pairs."""

    def setUp(self):
        self.rng = np.random.default_rng(20240817)

    def _pairs(self, min_size=2, max_size=50):
        for _ in range(100):
            n_a = int(self.rng.integers(min_size, max_size + 1))
            n_b = int(self.rng.integers(min_size, max_size + 1))
            a = self.rng.normal(0.0, 1.0, size=n_a)
            b = self.rng.normal(0.4, 1.3, size=n_b)
            yield a, b

    def test_ks(self):
        for a, b in self._pairs():
            self.assertLessEqual(
                abs(ks_statistic(a, b) - ks_stat_brute(list(a), list(b))), 1e-12
            )

    def test_wasserstein(self):
        for a, b in self._pairs():
            self.assertLessEqual(
                abs(wasserstein_distance(a, b) - wasserstein_brute(list(a), list(b))),
                1e-12,
            )

    def test_psi(self):
        # reference must hold at least as many points as bins
        for a, b in self._pairs(min_size=10):
            self.assertLessEqual(
                abs(psi(a, b) - psi_brute(list(a), list(b))), 1e-12
            )


# -- p-values and thresholds ----------------------------------------------------

def test_ks_pvalue_range_and_monotonicity():
    ps = [ks_pvalue(d, 30, 30) for d in (0.1, 0.3, 0.5, 0.9)]
    assert all(0.0 <= p <= 1.0 for p in ps)
    assert ps == sorted(ps, reverse=True)


def test_ks_pvalue_identical_samples_is_one():
    d, p, reject = ks_test([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    assert d == 0.0
    assert p == 1.0
    assert not reject


def test_ks_test_rejects_separated_samples():
    d, p, reject = ks_test(np.zeros(30), np.ones(30), alpha=0.05)
    assert d == 1.0
    assert reject


def test_wasserstein_properties():
    rng = np.random.default_rng(5)
    for _ in range(20):
        a = rng.normal(size=8)
        b = rng.normal(size=12)
        assert wasserstein_distance(a, b) == wasserstein_distance(b, a)
        assert wasserstein_distance(a, b) >= 0.0
        c = rng.uniform(-3, 3)
        assert wasserstein_distance(a, a + c) == pytest.approx(abs(c), abs=1e-12)


def test_wasserstein_triangle_inequality_small_samples():
    rng = np.random.default_rng(8)
    for _ in range(50):
        a = rng.normal(size=4)
        b = rng.normal(size=4)
        c = rng.normal(size=4)
        ab = wasserstein_distance(a, b)
        bc = wasserstein_distance(b, c)
        ac = wasserstein_distance(a, c)
        assert ac <= ab + bc + 1e-12


def test_calibration_is_deterministic_and_bounded():
    t1 = calibrate_wasserstein_threshold(500, 50, 0.95, seed=123)
    t2 = calibrate_wasserstein_threshold(500, 50, 0.95, seed=123)
    assert t1 == t2
    assert 0.0 < t1 < 1.0


def test_calibration_threshold_shrinks_with_sample_size():
    small = calibrate_wasserstein_threshold(300, 50, 0.95, seed=0)
    large = calibrate_wasserstein_threshold(300, 500, 0.95, seed=0)
    assert large < small


def test_calibration_quantile_zero_is_distribution_minimum():
    t = calibrate_wasserstein_threshold(200, 20, 1e-9, seed=4)
    assert t >= 0.0


def test_psi_critical_value_matches_table():
    # chi-square 0.95 quantile at 9 degrees of freedom is 16.919
    crit = psi_critical_value(25, 25, n_bins=10)
    assert crit == pytest.approx((2.0 / 25.0) * 16.919, rel=1e-3)
    assert psi_critical_value(50, 50, n_bins=10) < crit
    assert psi_critical_value(25, 25, n_bins=20) > crit
    with pytest.raises(ConfigError):
        psi_critical_value(25, 25, confidence=1.5)


def test_calibrated_psi_threshold_tracks_window_size():
    small = calibrate_psi_threshold(300, 25, 25, seed=1)
    assert small == calibrate_psi_threshold(300, 25, 25, seed=1)
    large = calibrate_psi_threshold(300, 200, 200, seed=1)
    assert 0.0 < large < small
    # at tiny windows the honest null cut sits far above the asymptotic one
    assert small > psi_critical_value(25, 25, confidence=0.99)
    lo = calibrate_psi_threshold(300, 25, 25, quantile=0.5, seed=1)
    assert lo < small
    with pytest.raises(ConfigError):
        calibrate_psi_threshold(quantile=0.0)
    with pytest.raises(ConfigError):
        calibrate_psi_threshold(iterations=0)


def test_rolling_psi_default_cut_is_quiet_on_steady_noise():
    series = np.random.default_rng(42).normal(0.0, 1.0, 300)
    alerts = rolling_drift_detect(series, window=25, method="psi")
    # 251 window positions; the far-tail default should flag almost none
    assert len(alerts) <= 10


# -- rolling detection ------------------------------------------------------------

def test_rolling_constant_series_never_alerts():
    series = np.full(120, 3.25)
    for method in ("ks", "wasserstein", "psi"):
        assert rolling_drift_detect(series, window=20, method=method) == []


def test_rolling_alert_positions_are_in_range():
    rng = np.random.default_rng(0)
    series = np.concatenate([rng.normal(0, 1, 100), rng.normal(4, 1, 100)])
    alerts = rolling_drift_detect(series, window=25, method="ks")
    assert alerts
    for a in alerts:
        assert 25 <= a.t <= 175
        assert a.method == "ks"
        assert 0.0 <= a.pvalue <= 1.0


def test_rolling_ks_alerts_concentrate_after_the_shift():
    rng = np.random.default_rng(3)
    series = np.concatenate([rng.normal(0, 1, 150), rng.normal(2, 1, 150)])
    alerts = rolling_drift_detect(series, window=25, method="ks")
    times = [a.t for a in alerts]
    near_change = [t for t in times if 126 <= t <= 175]
    assert len(near_change) >= 0.6 * len(times)


def test_rolling_reversal_mirrors_ks_alerts():
    rng = np.random.default_rng(11)
    series = np.concatenate([rng.normal(0, 1, 80), rng.normal(2, 1, 80)])
    n, w = len(series), 20
    fwd = {a.t for a in rolling_drift_detect(series, window=w, method="ks")}
    rev = {a.t for a in rolling_drift_detect(series[::-1], window=w, method="ks")}
    assert rev == {n - t for t in fwd}


def test_rolling_input_validation():
    with pytest.raises(InputError):
        rolling_drift_detect(np.zeros(30), window=20)
    with pytest.raises(ConfigError):
        rolling_drift_detect(np.zeros(100), window=20, method="mmd")
    with pytest.raises(ConfigError):
        rolling_drift_detect(np.zeros(100), window=20, method="psi", psi_threshold=0.0)


def test_detector_wrapper_roundtrip():
    rng = np.random.default_rng(1)
    series = np.concatenate([rng.normal(0, 1, 60), rng.normal(3, 1, 60)])
    det = RollingBaselineDetector(window=20, method="wasserstein")
    times = det.fit_predict(series)
    assert times.dtype == np.int64
    assert len(det.alerts_) == len(times)
    params = det.get_params()
    clone = RollingBaselineDetector(**params)
    assert np.array_equal(clone.fit_predict(series), times)
