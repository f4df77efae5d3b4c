import numpy as np
import pytest

from driftwatch.combiner import MlpCombiner
from driftwatch.errors import ConfigError, InputError


def _numeric_gradients(model, X, y, h=1e-6):
    """Central-difference gradients over every weight and bias entry."""
    grads_w, grads_b = [], []
    for store, grads in ((model.weights_, grads_w), (model.biases_, grads_b)):
        for arr in store:
            g = np.zeros_like(arr)
            it = np.nditer(arr, flags=["multi_index"])
            for _ in it:
                idx = it.multi_index
                keep = arr[idx]
                arr[idx] = keep + h
                up = model.loss(model.decision_function(X), y)
                arr[idx] = keep - h
                down = model.loss(model.decision_function(X), y)
                arr[idx] = keep
                g[idx] = (up - down) / (2.0 * h)
            grads.append(g)
    return grads_w, grads_b


def _relative_error(a, b):
    num = np.linalg.norm(a - b)
    den = np.linalg.norm(a) + np.linalg.norm(b) + 1e-12
    return num / den


def test_gradients_match_central_differences_on_twenty_nets():
    worst = 0.0
    for seed in range(20):
        rng = np.random.default_rng(1000 + seed)
        model = MlpCombiner(hidden=(5, 3), seed=seed)
        model.init_weights(4)
        # randomize biases as well: with biases pinned at zero a sample whose
        # first layer is fully inactive puts z2 exactly on the ReLU kink,
        # where finite differences are undefined
        model.biases_ = [rng.uniform(-0.5, 0.5, size=b.shape) for b in model.biases_]
        X = rng.uniform(0.05, 0.95, size=(12, 4))
        y = rng.integers(0, 2, size=12).astype(float)
        _, (_, z1, _, z2, _) = model._forward(X)
        clearance = min(np.abs(z1).min(), np.abs(z2).min())
        assert clearance > 1e-4, f"seed {seed} puts an activation on a kink"
        gw, gb = model.gradients(X, y)
        nw, nb = _numeric_gradients(model, X, y)
        for analytic, numeric in zip(gw + gb, nw + nb):
            worst = max(worst, _relative_error(analytic, numeric))
    assert worst < 1e-5, f"worst gradient relative error {worst:.3e}"


def test_learns_separable_scores_perfectly():
    rng = np.random.default_rng(7)
    n = 200
    clean = rng.uniform(0.0, 0.35, size=(n, 3))
    hot = rng.uniform(0.65, 1.0, size=(n, 3))
    X = np.vstack([clean, hot])
    y = np.concatenate([np.zeros(n), np.ones(n)])
    model = MlpCombiner(seed=1).fit(X, y)
    assert (model.predict(X) == y).all()
    assert model.loss_curve_[-1] < model.loss_curve_[0]


def test_training_is_deterministic():
    rng = np.random.default_rng(3)
    X = rng.uniform(0, 1, size=(60, 4))
    y = (X.sum(axis=1) > 2.0).astype(float)
    a = MlpCombiner(epochs=10, seed=5).fit(X, y)
    b = MlpCombiner(epochs=10, seed=5).fit(X, y)
    for wa, wb in zip(a.weights_, b.weights_):
        assert np.array_equal(wa, wb)
    assert a.loss_curve_ == b.loss_curve_


def test_zero_init_scale_gives_exactly_half():
    model = MlpCombiner(init_scale=0.0)
    model.init_weights(3)
    p = model.decision_function(np.random.default_rng(0).uniform(size=(5, 3)))
    assert np.all(p == 0.5)


def test_predict_proba_rows_sum_to_one():
    rng = np.random.default_rng(2)
    X = rng.uniform(0, 1, size=(50, 2))
    y = (X[:, 0] > 0.5).astype(float)
    model = MlpCombiner(epochs=5, seed=0).fit(X, y)
    proba = model.predict_proba(X)
    np.testing.assert_allclose(proba.sum(axis=1), 1.0, atol=1e-12)
    assert np.array_equal(proba[:, 1] > model.threshold, model.predict(X) == 1)


def test_save_load_roundtrip(tmp_path):
    rng = np.random.default_rng(4)
    X = rng.uniform(0, 1, size=(80, 3))
    y = (X[:, 0] + X[:, 1] > 1.0).astype(float)
    model = MlpCombiner(epochs=15, seed=9).fit(X, y)
    path = tmp_path / "combiner.npz"
    model.save(path)
    back = MlpCombiner.load(path)
    assert np.array_equal(back.decision_function(X), model.decision_function(X))
    assert back.get_params() == model.get_params()


def test_load_rejects_junk(tmp_path):
    path = tmp_path / "junk.npz"
    path.write_bytes(b"not a model")
    with pytest.raises(InputError):
        MlpCombiner.load(path)
    empty = tmp_path / "arrays.npz"
    np.savez(empty, a=np.zeros(3))
    with pytest.raises(InputError):
        MlpCombiner.load(empty)


def test_save_requires_fit(tmp_path):
    with pytest.raises(InputError):
        MlpCombiner().save(tmp_path / "x.npz")


class TestThresholdSelection:
    def _fitted(self):
        rng = np.random.default_rng(11)
        n = 300
        X = np.vstack([
            rng.uniform(0.0, 0.5, size=(n, 2)),
            rng.uniform(0.5, 1.0, size=(n, 2)),
        ])
        y = np.concatenate([np.zeros(n), np.ones(n)])
        return MlpCombiner(epochs=40, seed=2).fit(X, y), X, y

    def test_fpr_budget_is_respected(self):
        model, X, y = self._fitted()
        for budget in (0.0, 0.05, 0.2):
            thr = model.threshold_for_max_fpr(X, y, max_fpr=budget)
            p = model.decision_function(X)
            fpr = np.mean(p[y == 0] > thr)
            assert fpr <= budget + 1e-12

    def test_smaller_budget_never_lowers_the_cut(self):
        model, X, y = self._fitted()
        tight = model.threshold_for_max_fpr(X, y, max_fpr=0.01)
        loose = model.threshold_for_max_fpr(X, y, max_fpr=0.3)
        assert tight >= loose

    def test_budget_validation(self):
        model, X, y = self._fitted()
        with pytest.raises(ConfigError):
            model.threshold_for_max_fpr(X, y, max_fpr=1.0)


def test_input_validation():
    with pytest.raises(ConfigError):
        MlpCombiner(hidden=(4,)).init_weights(2)
    with pytest.raises(ConfigError):
        MlpCombiner(epochs=0).init_weights(2)
    rng = np.random.default_rng(0)
    X = rng.uniform(size=(10, 2))
    with pytest.raises(InputError):
        MlpCombiner().fit(X, np.arange(10))       # labels not 0/1
    with pytest.raises(InputError):
        MlpCombiner().fit(X, np.zeros(9))         # length mismatch
    model = MlpCombiner(epochs=2, seed=0).fit(X, (X[:, 0] > 0.5).astype(float))
    with pytest.raises(InputError):
        model.predict(rng.uniform(size=(4, 3)))   # wrong width
