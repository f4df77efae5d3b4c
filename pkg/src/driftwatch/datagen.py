"""Seeded synthetic scenario generators with ground truth.

Every generator takes an integer seed and drives a PCG64 generator
(`numpy.random.default_rng`), so a (generator, parameters, seed) triple
pins the stream bit-for-bit. Each returns a `Scenario` carrying the values,
the noise-free mean trace, the change point where one exists, and labels
for the multivariate anomaly scenario.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._validation import check_positive_int
from .errors import ConfigError, GenerationError, InputError

_CUBIC_MAX_TRIES = 1000


@dataclass
class Scenario:
    """A generated stream plus the ground truth that produced it."""

    name: str
    values: np.ndarray                 # (n,) or (n, d)
    mean_trace: np.ndarray             # same shape as values, noise-free
    seed: int
    params: dict = field(default_factory=dict)
    change_point: int | None = None
    labels: np.ndarray | None = None   # (n,) 0/1 anomaly flags, if labeled

    @property
    def n_samples(self) -> int:
        return int(self.values.shape[0])

    @property
    def n_dims(self) -> int:
        return 1 if self.values.ndim == 1 else int(self.values.shape[1])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Scenario):
            return NotImplemented
        same_labels = (
            (self.labels is None and other.labels is None)
            or (
                self.labels is not None
                and other.labels is not None
                and np.array_equal(self.labels, other.labels)
            )
        )
        return (
            self.name == other.name
            and self.seed == other.seed
            and self.params == other.params
            and self.change_point == other.change_point
            and np.array_equal(self.values, other.values)
            and np.array_equal(self.mean_trace, other.mean_trace)
            and same_labels
        )


def _check_n(n_samples: int) -> int:
    return check_positive_int(n_samples, "n_samples")


def gen_periodic(
    n_samples: int = 500,
    period: float = 250.0,
    amplitude: float = 0.5,
    noise_sd: float = 0.2,
    seed: int = 0,
) -> Scenario:
    """Sinusoid plus Gaussian noise: amplitude*sin(2*pi*t/period) + N(0, sd^2)."""
    n = _check_n(n_samples)
    if period <= 0:
        raise ConfigError(f"period must be positive, got {period}")
    if noise_sd < 0:
        raise ConfigError(f"noise_sd must be nonnegative, got {noise_sd}")
    rng = np.random.default_rng(seed)
    t = np.arange(n, dtype=np.float64)
    mean = amplitude * np.sin(2.0 * np.pi * t / period)
    values = mean + rng.normal(0.0, noise_sd, size=n)
    return Scenario(
        name="periodic",
        values=values,
        mean_trace=mean,
        seed=int(seed),
        params={
            "n_samples": n,
            "period": float(period),
            "amplitude": float(amplitude),
            "noise_sd": float(noise_sd),
        },
    )


def gen_monotonic_cubic(
    n_samples: int = 500,
    noise_sd: float = 0.2,
    seed: int = 0,
) -> Scenario:
    """Random monotonic cubic trend (over normalized time) plus noise.

    Coefficients are drawn N(0,1) and rejected until the derivative keeps one
    sign over the sampling grid; more than 1000 rejected draws raise a
    generation error.
    """
    n = _check_n(n_samples)
    if noise_sd < 0:
        raise ConfigError(f"noise_sd must be nonnegative, got {noise_sd}")
    rng = np.random.default_rng(seed)
    s = np.arange(n, dtype=np.float64) / max(n - 1, 1)
    coeffs = None
    for _ in range(_CUBIC_MAX_TRIES):
        cand = rng.normal(0.0, 1.0, size=4)  # a3*s^3 + a2*s^2 + a1*s + a0
        a3, a2, a1, _a0 = cand
        deriv = 3.0 * a3 * s**2 + 2.0 * a2 * s + a1
        if np.all(deriv >= 0.0) or np.all(deriv <= 0.0):
            coeffs = cand
            break
    if coeffs is None:
        raise GenerationError(
            f"no monotonic cubic found in {_CUBIC_MAX_TRIES} draws (seed={seed})"
        )
    a3, a2, a1, a0 = coeffs
    mean = a3 * s**3 + a2 * s**2 + a1 * s + a0
    values = mean + rng.normal(0.0, noise_sd, size=n)
    return Scenario(
        name="monotonic",
        values=values,
        mean_trace=mean,
        seed=int(seed),
        params={
            "n_samples": n,
            "noise_sd": float(noise_sd),
            "coefficients": [float(c) for c in coeffs],
        },
    )


def gen_abrupt(
    n_samples: int = 500,
    shift: float = 2.0,
    change_point: int = 250,
    noise_sd: float = 1.0,
    seed: int = 0,
) -> Scenario:
    """Level shift: mean 0 before the change point, `shift` from it onward."""
    n = _check_n(n_samples)
    if not 0 < change_point < n:
        raise ConfigError(
            f"change_point must lie strictly inside (0, {n}), got {change_point}"
        )
    if noise_sd < 0:
        raise ConfigError(f"noise_sd must be nonnegative, got {noise_sd}")
    rng = np.random.default_rng(seed)
    mean = np.zeros(n)
    mean[change_point:] = float(shift)
    values = mean + rng.normal(0.0, noise_sd, size=n)
    return Scenario(
        name="abrupt",
        values=values,
        mean_trace=mean,
        seed=int(seed),
        params={
            "n_samples": n,
            "shift": float(shift),
            "change_point": int(change_point),
            "noise_sd": float(noise_sd),
        },
        change_point=int(change_point),
    )


def gen_no_drift(
    n_samples: int = 500,
    noise_sd: float = 1.0,
    seed: int = 0,
) -> Scenario:
    """Stationary iid Gaussian noise around zero: the null stream."""
    n = _check_n(n_samples)
    if noise_sd < 0:
        raise ConfigError(f"noise_sd must be nonnegative, got {noise_sd}")
    rng = np.random.default_rng(seed)
    values = rng.normal(0.0, noise_sd, size=n)
    return Scenario(
        name="no-drift",
        values=values,
        mean_trace=np.zeros(n),
        seed=int(seed),
        params={"n_samples": n, "noise_sd": float(noise_sd)},
    )


def gen_labeled_multivariate(
    n_samples: int = 2000,
    n_dims: int = 6,
    anomaly_rate: float = 0.05,
    displacement: float = 2.5,
    ar_coeff: float = 0.8,
    correlation: float = 0.5,
    seed: int = 0,
) -> Scenario:
    """Correlated AR(1) channels with labeled joint displacement anomalies.

    At each labeled step an alternating-sign displacement pattern
    (+d, -d, +d, ...) scaled by `displacement` times the marginal channel
    deviation is added to the observation only (it does not feed back into
    the recursion): each channel moves moderately, but the joint pattern
    breaks the positive cross-channel correlation.
    """
    n = _check_n(n_samples)
    d = check_positive_int(n_dims, "n_dims")
    if d < 2:
        raise ConfigError(f"n_dims must be at least 2, got {n_dims}")
    if not 0.0 <= anomaly_rate < 1.0:
        raise ConfigError(f"anomaly_rate must lie in [0, 1), got {anomaly_rate}")
    if not 0.0 <= ar_coeff < 1.0:
        raise ConfigError(f"ar_coeff must lie in [0, 1), got {ar_coeff}")
    if not 0.0 <= correlation < 1.0:
        raise ConfigError(f"correlation must lie in [0, 1), got {correlation}")

    rng = np.random.default_rng(seed)
    # equicorrelated innovations via Cholesky of (1-rho) I + rho J
    cov = np.full((d, d), correlation)
    np.fill_diagonal(cov, 1.0)
    chol = np.linalg.cholesky(cov)

    innov = rng.normal(0.0, 1.0, size=(n, d)) @ chol.T
    x = np.zeros((n, d))
    # stationary marginal scale for the AR(1) recursion
    marginal_sd = 1.0 / np.sqrt(1.0 - ar_coeff**2)
    x[0] = innov[0] * marginal_sd
    for t in range(1, n):
        x[t] = ar_coeff * x[t - 1] + innov[t]

    labels = (rng.random(n) < anomaly_rate).astype(np.int8)
    pattern = np.where(np.arange(d) % 2 == 0, 1.0, -1.0)
    bump = displacement * marginal_sd * pattern
    values = x + labels[:, None] * bump[None, :]

    return Scenario(
        name="labeled-multivariate",
        values=values,
        mean_trace=x,
        seed=int(seed),
        params={
            "n_samples": n,
            "n_dims": d,
            "anomaly_rate": float(anomaly_rate),
            "displacement": float(displacement),
            "ar_coeff": float(ar_coeff),
            "correlation": float(correlation),
        },
        labels=labels,
    )


# -- serialization ----------------------------------------------------------

def scenario_columns(scenario: Scenario) -> list[str]:
    if scenario.values.ndim == 1:
        cols = ["t", "value"]
    else:
        cols = ["t"] + [f"dim_{i}" for i in range(scenario.n_dims)]
    if scenario.labels is not None:
        cols.append("label")
    return cols


def write_scenario(scenario: Scenario, csv_path) -> Path:
    """Write values (+labels) as CSV and the ground truth as a JSON sidecar.

    The sidecar (same path with `.meta.json` appended to the stem) stores
    seed, params, change point and the full-precision mean trace, so
    `read_scenario` reconstructs the Scenario exactly.
    """
    csv_path = Path(csv_path)
    values = scenario.values
    mat = values.reshape(-1, 1) if values.ndim == 1 else values
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(scenario_columns(scenario))
        for t in range(scenario.n_samples):
            row = [t] + [repr(float(v)) for v in mat[t]]
            if scenario.labels is not None:
                row.append(int(scenario.labels[t]))
            writer.writerow(row)
    meta = {
        "name": scenario.name,
        "seed": scenario.seed,
        "params": scenario.params,
        "change_point": scenario.change_point,
        "n_dims": scenario.n_dims,
        "has_labels": scenario.labels is not None,
        "mean_trace": [
            [float(v) for v in row]
            for row in (
                scenario.mean_trace.reshape(-1, 1)
                if scenario.mean_trace.ndim == 1
                else scenario.mean_trace
            )
        ],
    }
    sidecar_path(csv_path).write_text(json.dumps(meta, indent=1))
    return csv_path


def sidecar_path(csv_path) -> Path:
    csv_path = Path(csv_path)
    return csv_path.with_name(csv_path.stem + ".meta.json")


def read_scenario(csv_path) -> Scenario:
    """Inverse of `write_scenario`; requires the JSON sidecar."""
    csv_path = Path(csv_path)
    side = sidecar_path(csv_path)
    if not csv_path.exists():
        raise InputError(f"no such file: {csv_path}")
    if not side.exists():
        raise InputError(f"missing scenario sidecar: {side}")
    meta = json.loads(side.read_text())
    t_col, mat, labels = read_stream_csv(csv_path)
    if meta["n_dims"] == 1:
        values = mat[:, 0]
    else:
        values = mat
    mean = np.array(meta["mean_trace"], dtype=np.float64)
    mean = mean[:, 0] if meta["n_dims"] == 1 else mean
    if meta["has_labels"] and labels is None:
        raise InputError(f"sidecar expects a label column missing from {csv_path}")
    return Scenario(
        name=meta["name"],
        values=values,
        mean_trace=mean,
        seed=int(meta["seed"]),
        params=meta["params"],
        change_point=meta["change_point"],
        labels=labels if meta["has_labels"] else None,
    )


def read_stream_csv(csv_path):
    """Read a `t,value[,...]` / `t,dim_*[,label]` CSV.

    Returns (t, values, labels); labels is None without a label column.
    Used both by scenario round-tripping and by the CLI input path.
    """
    csv_path = Path(csv_path)
    if not csv_path.exists():
        raise InputError(f"no such file: {csv_path}")
    with open(csv_path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"empty input file: {csv_path}") from None
        header = [h.strip() for h in header]
        if not header or header[0] != "t":
            raise InputError(
                f"{csv_path}: first column must be 't', got {header[:1]}"
            )
        has_label = bool(header) and header[-1] == "label"
        value_cols = header[1:-1] if has_label else header[1:]
        if not value_cols:
            raise InputError(f"{csv_path}: no value columns found")
        if value_cols != ["value"] and value_cols != [
            f"dim_{i}" for i in range(len(value_cols))
        ]:
            raise InputError(
                f"{csv_path}: value columns must be 'value' or 'dim_0..dim_k', "
                f"got {value_cols}"
            )
        t_list, rows, labels = [], [], []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            expected = 1 + len(value_cols) + (1 if has_label else 0)
            if len(row) != expected:
                raise InputError(
                    f"{csv_path}:{line_no}: expected {expected} fields, got {len(row)}"
                )
            try:
                t_list.append(int(row[0]))
                rows.append([float(v) for v in row[1 : 1 + len(value_cols)]])
                if has_label:
                    labels.append(int(row[-1]))
            except ValueError as exc:
                raise InputError(f"{csv_path}:{line_no}: {exc}") from None
    if not rows:
        raise InputError(f"{csv_path}: no data rows")
    t = np.asarray(t_list, dtype=np.int64)
    values = np.asarray(rows, dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise InputError(f"{csv_path}: non-finite values present")
    return t, values, (np.asarray(labels, dtype=np.int8) if has_label else None)
