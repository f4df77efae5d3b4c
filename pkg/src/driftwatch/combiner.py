"""From-scratch MLP that fuses per-channel anomaly scores into one decision.

Two ReLU hidden layers and a logistic output unit, trained with Adam on
mean binary cross-entropy. Forward, backward and the optimizer are written
out explicitly so the arithmetic is auditable; gradients are exact (the
test suite checks them against central differences).
"""

from __future__ import annotations

import io
import json

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from ._validation import as_2d_floats, check_positive_int
from .errors import ConfigError, InputError

_MODEL_VERSION = 1


def _sigmoid(z: np.ndarray) -> np.ndarray:
    # numerically stable logistic
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


class MlpCombiner(BaseEstimator, ClassifierMixin):
    """Binary classifier over score vectors in [0, 1]^d.

    Weights start uniform on +-1/sqrt(fan_in) (or +-init_scale when given;
    0.0 makes every output exactly 0.5), biases at zero. Training runs
    exactly `epochs` passes of seeded shuffled mini-batches; `loss_curve_`
    records the mean batch loss per epoch.
    """

    def __init__(
        self,
        hidden=(16, 8),
        epochs: int = 120,
        batch_size: int = 32,
        learning_rate: float = 1e-3,
        beta1: float = 0.9,
        beta2: float = 0.999,
        adam_epsilon: float = 1e-8,
        threshold: float = 0.5,
        init_scale: float | None = None,
        seed: int = 0,
    ):
        self.hidden = hidden
        self.epochs = epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.adam_epsilon = adam_epsilon
        self.threshold = threshold
        self.init_scale = init_scale
        self.seed = seed

    # -- parameter plumbing --------------------------------------------------

    def _check_config(self):
        if len(self.hidden) != 2:
            raise ConfigError(f"hidden must name two layer sizes, got {self.hidden}")
        check_positive_int(int(self.hidden[0]), "hidden[0]")
        check_positive_int(int(self.hidden[1]), "hidden[1]")
        check_positive_int(self.epochs, "epochs")
        check_positive_int(self.batch_size, "batch_size")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigError("threshold must lie in [0, 1]")

    def init_weights(self, input_dim: int) -> None:
        """Seeded symmetric initialization scaled by each layer's fan-in."""
        self._check_config()
        input_dim = check_positive_int(input_dim, "input_dim")
        h1, h2 = int(self.hidden[0]), int(self.hidden[1])
        rng = np.random.default_rng(self.seed)

        def draw(fan_in, fan_out):
            scale = (
                self.init_scale
                if self.init_scale is not None
                else 1.0 / np.sqrt(fan_in)
            )
            return rng.uniform(-scale, scale, size=(fan_in, fan_out))

        self.weights_ = [draw(input_dim, h1), draw(h1, h2), draw(h2, 1)]
        self.biases_ = [np.zeros(h1), np.zeros(h2), np.zeros(1)]
        self.n_features_in_ = input_dim
        self._adam_m = [np.zeros_like(w) for w in self.weights_ + self.biases_]
        self._adam_v = [np.zeros_like(w) for w in self.weights_ + self.biases_]
        self._adam_t = 0

    # -- forward / backward ---------------------------------------------------

    def _forward(self, X: np.ndarray):
        z1 = X @ self.weights_[0] + self.biases_[0]
        a1 = np.maximum(z1, 0.0)
        z2 = a1 @ self.weights_[1] + self.biases_[1]
        a2 = np.maximum(z2, 0.0)
        z3 = a2 @ self.weights_[2] + self.biases_[2]
        p = _sigmoid(z3[:, 0])
        return p, (X, z1, a1, z2, a2)

    def decision_function(self, X) -> np.ndarray:
        """Fused anomaly probability per row."""
        X = self._check_scores(X)
        return self._forward(X)[0]

    @staticmethod
    def loss(p: np.ndarray, y: np.ndarray) -> float:
        """Mean binary cross-entropy, clipped away from log(0)."""
        eps = 1e-12
        p = np.clip(p, eps, 1.0 - eps)
        return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))

    def gradients(self, X, y):
        """Exact mean-BCE gradients for every weight and bias.

        Returns (grad_weights, grad_biases) matching the shapes of
        `weights_` and `biases_`.
        """
        X = self._check_scores(X)
        y = np.asarray(y, dtype=np.float64).ravel()
        if y.size != X.shape[0]:
            raise InputError("X and y lengths differ")
        p, (X0, z1, a1, z2, a2) = self._forward(X)
        n = X.shape[0]
        # d(meanBCE)/dz3 = (p - y) / n; ReLU gates pass gradient where z > 0
        dz3 = ((p - y) / n)[:, None]
        gw3 = a2.T @ dz3
        gb3 = dz3.sum(axis=0)
        da2 = dz3 @ self.weights_[2].T
        dz2 = da2 * (z2 > 0.0)
        gw2 = a1.T @ dz2
        gb2 = dz2.sum(axis=0)
        da1 = dz2 @ self.weights_[1].T
        dz1 = da1 * (z1 > 0.0)
        gw1 = X0.T @ dz1
        gb1 = dz1.sum(axis=0)
        return [gw1, gw2, gw3], [gb1, gb2, gb3]

    def _adam_step(self, grads_w, grads_b):
        self._adam_t += 1
        t = self._adam_t
        lr, b1, b2, eps = (
            self.learning_rate,
            self.beta1,
            self.beta2,
            self.adam_epsilon,
        )
        params = self.weights_ + self.biases_
        grads = grads_w + grads_b
        for i, (param, grad) in enumerate(zip(params, grads)):
            self._adam_m[i] = b1 * self._adam_m[i] + (1.0 - b1) * grad
            self._adam_v[i] = b2 * self._adam_v[i] + (1.0 - b2) * grad**2
            m_hat = self._adam_m[i] / (1.0 - b1**t)
            v_hat = self._adam_v[i] / (1.0 - b2**t)
            param -= lr * m_hat / (np.sqrt(v_hat) + eps)

    # -- training / inference -------------------------------------------------

    def fit(self, X, y):
        X = self._check_scores(X, reset=True)
        y = np.asarray(y, dtype=np.float64).ravel()
        if y.size != X.shape[0]:
            raise InputError("X and y lengths differ")
        if not np.isin(y, (0.0, 1.0)).all():
            raise InputError("labels must be 0/1")
        self.classes_ = np.array([0, 1])
        self.init_weights(X.shape[1])
        rng = np.random.default_rng(self.seed + 1)  # shuffling stream
        n = X.shape[0]
        self.loss_curve_ = []
        for _ in range(self.epochs):
            order = rng.permutation(n)
            batch_losses = []
            for start in range(0, n, self.batch_size):
                idx = order[start : start + self.batch_size]
                xb, yb = X[idx], y[idx]
                p, _ = self._forward(xb)
                batch_losses.append(self.loss(p, yb))
                gw, gb = self.gradients(xb, yb)
                self._adam_step(gw, gb)
            self.loss_curve_.append(float(np.mean(batch_losses)))
        return self

    def predict_proba(self, X) -> np.ndarray:
        p = self.decision_function(X)
        return np.column_stack([1.0 - p, p])

    def predict(self, X) -> np.ndarray:
        """1 when the fused probability strictly exceeds the threshold."""
        return (self.decision_function(X) > self.threshold).astype(np.int64)

    def _check_scores(self, X, reset: bool = False) -> np.ndarray:
        X = as_2d_floats(X, "X")
        if X.shape[0] == 0:
            raise InputError("X is empty")
        if not reset and hasattr(self, "n_features_in_"):
            if X.shape[1] != self.n_features_in_:
                raise InputError(
                    f"X has {X.shape[1]} columns, model expects {self.n_features_in_}"
                )
        return X

    # -- threshold selection ---------------------------------------------------

    def threshold_for_max_fpr(self, X, y, max_fpr: float = 0.05) -> float:
        """Smallest cut keeping the false-positive rate at or under max_fpr.

        Evaluates fused probabilities on (X, y) and returns a threshold such
        that the fraction of negatives scoring strictly above it is <= max_fpr,
        preferring the smallest such cut (maximizing recall).
        """
        if not 0.0 <= max_fpr < 1.0:
            raise ConfigError(f"max_fpr must lie in [0, 1), got {max_fpr}")
        y = np.asarray(y).ravel()
        p = self.decision_function(X)
        neg = np.sort(p[y == 0])[::-1]
        if neg.size == 0:
            return 0.0
        allowed = int(np.floor(max_fpr * neg.size))
        if allowed >= neg.size:
            return 0.0
        # the (allowed+1)-th largest negative score: everything strictly above
        # it counts at most `allowed` negatives
        return float(neg[allowed])

    # -- serialization ----------------------------------------------------------

    def save(self, path) -> None:
        """Write weights, biases and the full config to an .npz file."""
        if not hasattr(self, "weights_"):
            raise InputError("model has no weights to save; call fit first")
        meta = {
            "version": _MODEL_VERSION,
            "input_dim": self.n_features_in_,
            "params": {
                k: (list(v) if isinstance(v, tuple) else v)
                for k, v in self.get_params().items()
            },
        }
        arrays = {"meta": np.frombuffer(json.dumps(meta).encode(), dtype=np.uint8)}
        for i, (w, b) in enumerate(zip(self.weights_, self.biases_), start=1):
            arrays[f"w{i}"] = w
            arrays[f"b{i}"] = b
        with open(path, "wb") as fh:
            buf = io.BytesIO()
            np.savez(buf, **arrays)
            fh.write(buf.getvalue())

    @classmethod
    def load(cls, path) -> "MlpCombiner":
        try:
            with np.load(path) as data:
                arrays = {k: data[k] for k in data.files}
        except (OSError, ValueError) as exc:
            raise InputError(f"cannot load model from {path}: {exc}") from None
        if "meta" not in arrays:
            raise InputError(f"{path} is not a combiner model file")
        meta = json.loads(bytes(arrays["meta"]).decode())
        if meta.get("version") != _MODEL_VERSION:
            raise InputError(f"unsupported model version {meta.get('version')}")
        params = dict(meta["params"])
        if isinstance(params.get("hidden"), list):
            params["hidden"] = tuple(params["hidden"])
        model = cls(**params)
        model.init_weights(int(meta["input_dim"]))
        model.weights_ = [np.asarray(arrays[f"w{i}"]) for i in (1, 2, 3)]
        model.biases_ = [np.asarray(arrays[f"b{i}"]) for i in (1, 2, 3)]
        model.classes_ = np.array([0, 1])
        return model
