import numpy as np
import pytest

from driftwatch.datagen import (
    gen_abrupt,
    gen_labeled_multivariate,
    gen_monotonic_cubic,
    gen_no_drift,
    gen_periodic,
    read_scenario,
    read_stream_csv,
    write_scenario,
)
from driftwatch.errors import ConfigError, InputError


def test_periodic_mean_trace_is_the_stated_sinusoid():
    sc = gen_periodic(100, period=50.0, amplitude=2.0, noise_sd=0.1, seed=3)
    t = np.arange(100)
    expected = 2.0 * np.sin(2.0 * np.pi * t / 50.0)
    np.testing.assert_allclose(sc.mean_trace, expected, rtol=0, atol=1e-12)
    assert sc.values.shape == (100,)
    assert sc.name == "periodic"


def test_periodic_noise_scale():
    sc = gen_periodic(5000, noise_sd=0.2, seed=1)
    resid = sc.values - sc.mean_trace
    assert 0.17 < resid.std() < 0.23


def test_generators_are_deterministic_per_seed():
    for gen in (gen_periodic, gen_monotonic_cubic, gen_abrupt, gen_no_drift):
        a = gen(300, seed=11)
        b = gen(300, seed=11)
        c = gen(300, seed=12)
        assert a == b
        assert not np.array_equal(a.values, c.values)


def test_monotonic_cubic_mean_is_monotone():
    for seed in range(5):
        sc = gen_monotonic_cubic(300, seed=seed)
        diffs = np.diff(sc.mean_trace)
        assert np.all(diffs >= -1e-12) or np.all(diffs <= 1e-12)


def test_abrupt_mean_levels():
    sc = gen_abrupt(100, shift=3.0, change_point=40, noise_sd=0.5, seed=0)
    assert np.all(sc.mean_trace[:40] == 0.0)
    assert np.all(sc.mean_trace[40:] == 3.0)
    assert sc.change_point == 40


def test_abrupt_change_point_must_be_interior():
    with pytest.raises(ConfigError):
        gen_abrupt(100, change_point=0)
    with pytest.raises(ConfigError):
        gen_abrupt(100, change_point=100)


def test_no_drift_is_centred_noise():
    sc = gen_no_drift(4000, noise_sd=1.0, seed=9)
    assert np.all(sc.mean_trace == 0.0)
    assert abs(sc.values.mean()) < 0.1
    assert 0.9 < sc.values.std() < 1.1


def test_bad_sizes_rejected():
    with pytest.raises(ConfigError):
        gen_no_drift(0)
    with pytest.raises(ConfigError):
        gen_periodic(100, period=-1.0)
    with pytest.raises(ConfigError):
        gen_no_drift(100, noise_sd=-0.5)


class TestLabeledMultivariate:
    def test_shapes_and_label_rate(self):
        sc = gen_labeled_multivariate(2000, 6, 0.05, seed=0)
        assert sc.values.shape == (2000, 6)
        assert sc.labels.shape == (2000,)
        assert set(np.unique(sc.labels)) <= {0, 1}
        rate = sc.labels.mean()
        assert 0.03 < rate < 0.07

    def test_displacement_applies_only_on_labeled_rows(self):
        sc = gen_labeled_multivariate(500, 4, 0.1, displacement=2.5, seed=2)
        gap = sc.values - sc.mean_trace
        clean = sc.labels == 0
        assert np.all(gap[clean] == 0.0)
        # labeled rows move by the alternating +/- pattern, identically each time
        hot = gap[sc.labels == 1]
        assert hot.shape[0] > 0
        first = hot[0]
        assert np.all(hot == first)
        assert first[0] > 0 > first[1]

    def test_dimension_and_rate_validation(self):
        with pytest.raises(ConfigError):
            gen_labeled_multivariate(100, 1, 0.05)
        with pytest.raises(ConfigError):
            gen_labeled_multivariate(100, 4, 1.0)
        with pytest.raises(ConfigError):
            gen_labeled_multivariate(100, 4, 0.05, ar_coeff=1.0)


def test_scenario_roundtrip_univariate(tmp_path):
    sc = gen_abrupt(50, change_point=20, seed=5)
    path = tmp_path / "abrupt.csv"
    write_scenario(sc, path)
    back = read_scenario(path)
    assert back == sc


def test_scenario_roundtrip_labeled(tmp_path):
    sc = gen_labeled_multivariate(80, 3, 0.2, seed=7)
    path = tmp_path / "multi.csv"
    write_scenario(sc, path)
    back = read_scenario(path)
    assert back == sc
    t, values, labels = read_stream_csv(path)
    assert values.shape == (80, 3)
    assert np.array_equal(labels, sc.labels)
    assert np.array_equal(t, np.arange(80))


def test_read_scenario_requires_sidecar(tmp_path):
    sc = gen_no_drift(30, seed=1)
    path = tmp_path / "plain.csv"
    write_scenario(sc, path)
    (tmp_path / "plain.meta.json").unlink()
    with pytest.raises(InputError):
        read_scenario(path)


def test_stream_csv_rejects_malformed_input(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("time,value\n0,1.0\n")
    with pytest.raises(InputError):
        read_stream_csv(bad)
    bad.write_text("t,value\n0,1.0\n1\n")
    with pytest.raises(InputError):
        read_stream_csv(bad)
    bad.write_text("t,value\n0,nan\n")
    with pytest.raises(InputError):
        read_stream_csv(bad)
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(InputError):
        read_stream_csv(empty)
