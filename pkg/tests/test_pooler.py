import numpy as np
import pytest

from driftwatch.errors import InputError
from driftwatch.htm import PoolerConfig, Sdr, SpatialPooler


def tiny_pooler():
    # 8 columns over 6 input bits, full potential pools so connectivity is
    # exactly what the test writes into the permanence matrix.
    cfg = PoolerConfig(
        n_columns=8,
        n_active_columns=2,
        potential_fraction=1.0,
        permanence_connected=0.5,
        permanence_inc=0.1,
        permanence_dec=0.05,
        seed=7,
    )
    sp = SpatialPooler(cfg, n_inputs=6)
    perms = np.full((8, 6), 0.2)
    # col 0 connects to bits {0,2,4}; col 1 to {0,2}; col 2 to {0,2};
    # col 3 to {1,3,5}; the rest stay unconnected.
    perms[0, [0, 2, 4]] = 0.6
    perms[1, [0, 2]] = 0.6
    perms[2, [0, 2]] = 0.6
    perms[3, [1, 3, 5]] = 0.6
    sp.permanences = perms
    sp.connected = sp.potential & (perms >= cfg.permanence_connected)
    return sp


def test_hand_traced_winners():
    sp = tiny_pooler()
    # input {0,2,4}: overlaps are col0=3, col1=2, col2=2, col3=0, others 0.
    # Two winners: col0, then the col1/col2 tie resolves to the lower index.
    out = sp.compute(Sdr(6, [0, 2, 4]), learn=False)
    assert out.active.tolist() == [0, 1]


def test_hand_traced_learning_update():
    sp = tiny_pooler()
    sp.compute(Sdr(6, [0, 2, 4]), learn=True)
    # winners {0,1}: +0.1 on bits {0,2,4}, -0.05 on bits {1,3,5}
    np.testing.assert_allclose(
        sp.permanences[0], [0.7, 0.15, 0.7, 0.15, 0.7, 0.15]
    )
    np.testing.assert_allclose(
        sp.permanences[1], [0.7, 0.15, 0.7, 0.15, 0.3, 0.15]
    )
    # losers untouched
    np.testing.assert_allclose(sp.permanences[3], [0.2, 0.6, 0.2, 0.6, 0.2, 0.6])


def test_zero_active_bits_gives_lowest_index_winners():
    cfg = PoolerConfig(n_columns=64, n_active_columns=5, seed=3)
    sp = SpatialPooler(cfg, n_inputs=40)
    out = sp.compute(Sdr(40, []), learn=False)
    assert out.active.tolist() == [0, 1, 2, 3, 4]


def test_exact_winner_count_and_determinism():
    cfg = PoolerConfig(seed=11)
    sp1 = SpatialPooler(cfg, n_inputs=400)
    sp2 = SpatialPooler(cfg, n_inputs=400)
    rng = np.random.default_rng(0)
    for _ in range(20):
        bits = np.sort(rng.choice(400, size=21, replace=False))
        a = sp1.compute(Sdr(400, bits), learn=True)
        b = sp2.compute(Sdr(400, bits), learn=True)
        assert a == b
        assert a.n_active == cfg.n_active_columns


def test_repeated_input_keeps_winner_set():
    cfg = PoolerConfig(seed=5)
    sp = SpatialPooler(cfg, n_inputs=400)
    x = Sdr(400, np.arange(100, 121))
    first = sp.compute(x, learn=True)
    for _ in range(10):
        again = sp.compute(x, learn=True)
        assert again == first


def test_no_learn_leaves_permanences_alone():
    cfg = PoolerConfig(seed=2)
    sp = SpatialPooler(cfg, n_inputs=400)
    before = sp.permanences.copy()
    sp.compute(Sdr(400, np.arange(50, 71)), learn=False)
    assert np.array_equal(before, sp.permanences)


def test_width_mismatch():
    sp = SpatialPooler(PoolerConfig(seed=1), n_inputs=400)
    with pytest.raises(InputError):
        sp.compute(Sdr(300, [1, 2]), learn=False)


def test_permanences_stay_in_unit_interval():
    cfg = PoolerConfig(seed=9, permanence_inc=0.3, permanence_dec=0.3)
    sp = SpatialPooler(cfg, n_inputs=60)
    x = Sdr(60, np.arange(0, 10))
    for _ in range(30):
        sp.compute(x, learn=True)
    assert sp.permanences.min() >= 0.0
    assert sp.permanences.max() <= 1.0
