"""Command-line interface.

Subcommands: simulate, detect, baseline, calibrate-wasserstein,
train-combiner, score-combiner, bench. Exit codes: 0 success, 2 bad input
data, 3 bad configuration, 4 internal error.

Every run writes a manifest.json into --out-dir recording the argv, seed,
and resolved parameters; replaying that argv reproduces every other output
byte for byte. Stdout is deterministic — wall-clock time appears only
inside the manifest. Event times in outputs are expressed in the input
file's own `t` column, so slices of a larger stream keep their original
clock.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .baselines import rolling_drift_detect, calibrate_wasserstein_threshold
from .combiner import MlpCombiner
from .config import (
    build_manifest,
    load_config,
    preset_params,
    resolve_seed,
    section_params,
    write_manifest,
)
from .datagen import (
    gen_abrupt,
    gen_labeled_multivariate,
    gen_monotonic_cubic,
    gen_no_drift,
    gen_periodic,
    read_stream_csv,
    write_scenario,
)
from .errors import ConfigError, DriftwatchError, InputError
from .pipeline import HtmSprtDetector, drift_windows

SEED_ENV_VAR = "DRIFTWATCH_SEED"

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CONFIG = 3
EXIT_INTERNAL = 4

_GENERATORS = {
    "periodic": gen_periodic,
    "cubic": gen_monotonic_cubic,
    "abrupt": gen_abrupt,
    "no-drift": gen_no_drift,
    "multivariate": gen_labeled_multivariate,
}

_DETECTOR_KEYS = sorted(HtmSprtDetector().get_params())
_BASELINE_KEYS = (
    "window", "alpha", "wasserstein_threshold", "psi_threshold",
    "psi_bins", "calibration_seed", "seed",
)
_CALIBRATE_KEYS = ("iterations", "sample_size", "quantile", "seed")
_COMBINER_KEYS = (
    "hidden", "epochs", "batch_size", "learning_rate", "threshold",
    "max_fpr", "train_fraction", "seed",
)
_SIMULATE_KEYS = (
    "n_samples", "period", "amplitude", "noise_sd", "shift", "change_point",
    "n_dims", "anomaly_rate", "displacement", "ar_coeff", "correlation",
    "seed",
)
_BENCH_KEYS = ("n_samples", "n_seeds", "seed")


def _float_str(x) -> str:
    return repr(float(x))


def _prepare_out_dir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _detector_params(args, config) -> tuple[dict, dict]:
    """Merge defaults <- preset <- config <- --seed; returns (params, applied_defaults)."""
    params: dict = {}
    defaults_applied: dict = {}
    if getattr(args, "preset", None):
        params.update(preset_params(args.preset))
    file_params = section_params(config, "detector", _DETECTOR_KEYS)
    params.update(file_params)
    if "encoder_range" in params and params["encoder_range"] is not None:
        params["encoder_range"] = tuple(params["encoder_range"])
    touched = set(params)
    if "p_alt" not in touched:
        # record that the drifted-regime exceedance probability fell back
        defaults_applied["p_alt"] = HtmSprtDetector().get_params()["p_alt"]
    seed = resolve_seed(
        args.seed, file_params.get("seed"), os.environ.get(SEED_ENV_VAR)
    )
    params["seed"] = seed
    return params, defaults_applied


def _read_stream(path):
    if not path:
        raise InputError("--input is required for this command")
    return read_stream_csv(path)


def _write_events_jsonl(path, events, t_col) -> None:
    with open(path, "w") as fh:
        for ev in events:
            rec = ev.to_json_dict()
            rec["global_time"] = int(t_col[ev.global_time])
            fh.write(json.dumps(rec) + "\n")


def _write_windows_csv(path, windows, t_col) -> None:
    with open(path, "w") as fh:
        fh.write("start,end\n")
        for w in windows:
            end = "" if w.end is None else str(int(t_col[w.end]))
            fh.write(f"{int(t_col[w.start])},{end}\n")


def _write_trace_csv(path, trace, t_col) -> None:
    with open(path, "w") as fh:
        fh.write("t,dim,htm_raw,htm_t,c,cm,lower,upper\n")
        for row in trace:
            raw = "" if row["htm_raw"] is None else _float_str(row["htm_raw"])
            fh.write(
                f"{int(t_col[row['t']])},{row['dim']},{raw},"
                f"{_float_str(row['htm_t'])},{row['c']},{row['cm']},"
                f"{_float_str(row['lower'])},{_float_str(row['upper'])}\n"
            )


def _write_alerts_csv(path, alerts, t_col) -> None:
    with open(path, "w") as fh:
        fh.write("t,method,statistic,threshold,pvalue\n")
        for a in alerts:
            pv = "" if a.pvalue is None else _float_str(a.pvalue)
            fh.write(
                f"{int(t_col[a.t])},{a.method},{_float_str(a.statistic)},"
                f"{_float_str(a.threshold)},{pv}\n"
            )


# -- subcommands ----------------------------------------------------------


def cmd_simulate(args) -> int:
    config = load_config(args.config) if args.config else {}
    params = section_params(config, "simulate", _SIMULATE_KEYS)
    seed = resolve_seed(args.seed, params.pop("seed", None), os.environ.get(SEED_ENV_VAR))
    gen = _GENERATORS.get(args.scenario)
    if gen is None:
        raise ConfigError(
            f"unknown scenario {args.scenario!r}; "
            f"available: {', '.join(sorted(_GENERATORS))}"
        )
    scenario = gen(seed=seed, **params)
    out = _prepare_out_dir(args.out_dir)
    csv_path = out / f"{scenario.name}.csv"
    write_scenario(scenario, csv_path)
    manifest = build_manifest(
        "simulate", sys.argv[1:] if args.raw_argv is None else args.raw_argv,
        seed, {"scenario": args.scenario, **params},
        [csv_path.name, csv_path.with_suffix("").name + ".meta.json"],
    )
    write_manifest(out, manifest)
    print(f"scenario={scenario.name} samples={scenario.n_samples} dims={scenario.n_dims}")
    print(f"wrote {csv_path.name}")
    return EXIT_OK


def cmd_detect(args) -> int:
    config = load_config(args.config) if args.config else {}
    params, defaults_applied = _detector_params(args, config)
    t_col, values, _labels = _read_stream(args.input)
    det = HtmSprtDetector(**params)
    if args.trace:
        det.record_trace = True
    det.fit(values)
    out = _prepare_out_dir(args.out_dir)
    outputs = ["events.jsonl", "windows.csv"]
    _write_events_jsonl(out / "events.jsonl", det.events_, t_col)
    _write_windows_csv(out / "windows.csv", det.windows_, t_col)
    if args.trace:
        _write_trace_csv(out / "trace.csv", det.trace_, t_col)
        outputs.append("trace.csv")
    manifest = build_manifest(
        "detect", sys.argv[1:] if args.raw_argv is None else args.raw_argv,
        params["seed"], params, outputs, defaults_applied,
    )
    write_manifest(out, manifest)
    onsets = det.drift_onsets_
    print(
        f"samples={det.n_seen_} dims={det.n_dims_} events={len(det.events_)} "
        f"onsets={onsets.size}"
    )
    if onsets.size:
        print("onset_times=" + ",".join(str(int(t_col[i])) for i in onsets))
    return EXIT_OK


def cmd_baseline(args) -> int:
    config = load_config(args.config) if args.config else {}
    params = section_params(config, "baseline", _BASELINE_KEYS)
    seed = resolve_seed(args.seed, params.pop("seed", None), os.environ.get(SEED_ENV_VAR))
    t_col, values, _labels = _read_stream(args.input)
    if values.shape[1] != 1:
        raise InputError("baseline detection expects a univariate stream")
    series = values[:, 0]
    window = int(params.pop("window", args.window))
    method = args.method
    alerts = rolling_drift_detect(
        series, window=window, method=method,
        calibration_seed=params.pop("calibration_seed", seed),
        **params,
    )
    out = _prepare_out_dir(args.out_dir)
    _write_alerts_csv(out / "alerts.csv", alerts, t_col)
    manifest = build_manifest(
        "baseline", sys.argv[1:] if args.raw_argv is None else args.raw_argv,
        seed, {"method": method, "window": window, **params}, ["alerts.csv"],
    )
    write_manifest(out, manifest)
    print(f"method={method} window={window} alerts={len(alerts)}")
    return EXIT_OK


def cmd_calibrate_wasserstein(args) -> int:
    config = load_config(args.config) if args.config else {}
    params = section_params(config, "calibrate", _CALIBRATE_KEYS)
    seed = resolve_seed(args.seed, params.pop("seed", None), os.environ.get(SEED_ENV_VAR))
    iterations = int(params.get("iterations", 500))
    sample_size = int(params.get("sample_size", 50))
    quantile = float(params.get("quantile", 0.95))
    threshold = calibrate_wasserstein_threshold(
        iterations=iterations, sample_size=sample_size, quantile=quantile, seed=seed
    )
    out = _prepare_out_dir(args.out_dir)
    payload = {
        "threshold": threshold,
        "iterations": iterations,
        "sample_size": sample_size,
        "quantile": quantile,
        "seed": seed,
    }
    with open(out / "calibration.json", "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    manifest = build_manifest(
        "calibrate-wasserstein",
        sys.argv[1:] if args.raw_argv is None else args.raw_argv,
        seed, payload, ["calibration.json"],
    )
    write_manifest(out, manifest)
    print(f"wasserstein_threshold={_float_str(threshold)}")
    return EXIT_OK


def cmd_train_combiner(args) -> int:
    config = load_config(args.config) if args.config else {}
    det_params, defaults_applied = _detector_params(args, config)
    comb_params = section_params(config, "combiner", _COMBINER_KEYS)
    seed = det_params["seed"]
    t_col, values, labels = _read_stream(args.input)
    if labels is None:
        raise InputError("train-combiner needs a labeled stream (label column)")
    det = HtmSprtDetector(**det_params)
    scores = det.fit_transform(values)

    train_fraction = float(comb_params.pop("train_fraction", 0.7))
    if not 0.0 < train_fraction < 1.0:
        raise ConfigError(f"train_fraction must be in (0, 1), got {train_fraction}")
    max_fpr = float(comb_params.pop("max_fpr", 0.05))
    if "hidden" in comb_params:
        comb_params["hidden"] = tuple(comb_params["hidden"])
    comb_params.setdefault("seed", seed)
    split = int(round(train_fraction * len(scores)))
    if split < 1 or split >= len(scores):
        raise InputError("stream too short for the requested train/test split")
    x_tr, y_tr = scores[:split], labels[:split]
    x_te, y_te = scores[split:], labels[split:]

    model = MlpCombiner(**comb_params)
    model.fit(x_tr, y_tr)
    threshold = model.threshold_for_max_fpr(x_tr, y_tr, max_fpr=max_fpr)
    model.threshold = threshold

    pred_te = model.predict(x_te)
    pos = y_te == 1
    neg = ~pos
    recall = float((pred_te[pos] == 1).mean()) if pos.any() else float("nan")
    fpr = float((pred_te[neg] == 1).mean()) if neg.any() else float("nan")

    out = _prepare_out_dir(args.out_dir)
    model.save(out / "combiner.npz")
    with open(out / "scores.csv", "w") as fh:
        cols = ",".join(f"score_{i}" for i in range(scores.shape[1]))
        fh.write(f"t,{cols},label\n")
        for i in range(len(scores)):
            vals = ",".join(_float_str(v) for v in scores[i])
            fh.write(f"{int(t_col[i])},{vals},{int(labels[i])}\n")
    metrics = {
        "threshold": threshold,
        "max_fpr": max_fpr,
        "train_fraction": train_fraction,
        "train_samples": int(split),
        "test_samples": int(len(scores) - split),
        "test_recall": recall,
        "test_fpr": fpr,
        "final_train_loss": model.loss_curve_[-1],
    }
    with open(out / "metrics.json", "w") as fh:
        json.dump(metrics, fh, indent=2, sort_keys=True)
        fh.write("\n")
    manifest = build_manifest(
        "train-combiner", sys.argv[1:] if args.raw_argv is None else args.raw_argv,
        seed,
        {"detector": det_params, "combiner": {**comb_params,
                                              "train_fraction": train_fraction,
                                              "max_fpr": max_fpr}},
        ["combiner.npz", "scores.csv", "metrics.json"],
        defaults_applied,
    )
    write_manifest(out, manifest)
    print(
        f"trained on {split} samples, tested on {len(scores) - split}; "
        f"test_recall={recall:.4f} test_fpr={fpr:.4f} "
        f"threshold={_float_str(threshold)}"
    )
    return EXIT_OK


def _read_scores_csv(path):
    try:
        with open(path, newline="") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise InputError(f"cannot read scores file {path}: {exc}") from None
    if not lines:
        raise InputError(f"scores file {path} is empty")
    header = lines[0].split(",")
    if header[0] != "t" or len(header) < 2:
        raise InputError("scores file must start with a 't' column")
    has_label = header[-1] == "label"
    score_cols = header[1:-1] if has_label else header[1:]
    for i, name in enumerate(score_cols):
        if name != f"score_{i}":
            raise InputError(f"unexpected scores column {name!r}")
    ts, rows, labels = [], [], []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != len(header):
            raise InputError(f"scores file line {lineno}: wrong field count")
        ts.append(int(parts[0]))
        vals = [float(p) for p in parts[1:-1]] if has_label else [float(p) for p in parts[1:]]
        rows.append(vals)
        if has_label:
            labels.append(int(parts[-1]))
    if not rows:
        raise InputError(f"scores file {path} has no data rows")
    return (
        np.asarray(ts),
        np.asarray(rows, dtype=np.float64),
        np.asarray(labels) if has_label else None,
    )


def cmd_score_combiner(args) -> int:
    if not args.model:
        raise InputError("--model is required for score-combiner")
    t_col, scores, labels = _read_scores_csv(args.input)
    model = MlpCombiner.load(args.model)
    proba = model.decision_function(scores)
    pred = (proba > model.threshold).astype(int)
    out = _prepare_out_dir(args.out_dir)
    with open(out / "predictions.csv", "w") as fh:
        fh.write("t,proba,pred\n")
        for i in range(len(scores)):
            fh.write(f"{int(t_col[i])},{_float_str(proba[i])},{pred[i]}\n")
    manifest = build_manifest(
        "score-combiner", sys.argv[1:] if args.raw_argv is None else args.raw_argv,
        0, {"model": str(args.model), "threshold": model.threshold},
        ["predictions.csv"],
    )
    write_manifest(out, manifest)
    line = f"scored {len(scores)} samples, {int(pred.sum())} flagged"
    if labels is not None:
        pos = labels == 1
        if pos.any():
            line += f"; recall={float((pred[pos] == 1).mean()):.4f}"
    print(line)
    return EXIT_OK


_BENCH_PRESET = {"abrupt": "shock", "no-drift": "shock",
                 "periodic": "periodic", "cubic": "slow-mean"}
_BENCH_BASELINE_WINDOWS = {"ks": 15, "wasserstein": 25, "psi": 25}


def cmd_bench(args) -> int:
    config = load_config(args.config) if args.config else {}
    params = section_params(config, "bench", _BENCH_KEYS)
    seed = resolve_seed(args.seed, params.pop("seed", None), os.environ.get(SEED_ENV_VAR))
    n_samples = int(params.get("n_samples", 500))
    out = _prepare_out_dir(args.out_dir)
    w_threshold = calibrate_wasserstein_threshold(seed=seed)
    # scale the break point / period with the stream so short benches work
    scenarios = {
        "abrupt": gen_abrupt(n_samples=n_samples, change_point=n_samples // 2,
                             seed=seed),
        "no-drift": gen_no_drift(n_samples=n_samples, seed=seed),
        "periodic": gen_periodic(n_samples=n_samples, period=n_samples / 2.0,
                                 seed=seed),
        "cubic": gen_monotonic_cubic(n_samples=n_samples, seed=seed),
    }
    outputs = ["bench_summary.csv"]
    summary_rows = []
    for name, sc in scenarios.items():
        series = sc.values[:, 0]
        det = HtmSprtDetector(**preset_params(_BENCH_PRESET[name]), seed=seed)
        det.fit(series)
        alert_ts = {"proposed": [int(i) for i in det.drift_onsets_]}
        for method, window in _BENCH_BASELINE_WINDOWS.items():
            alerts = rolling_drift_detect(
                series, window=window, method=method,
                wasserstein_threshold=(w_threshold if method == "wasserstein" else None),
                calibration_seed=seed,
            )
            alert_ts[method] = [a.t for a in alerts]
        cp = sc.change_point
        for method, ts in alert_ts.items():
            first = ts[0] if ts else None
            delay = (first - cp) if (first is not None and cp is not None) else None
            summary_rows.append((name, method, len(ts), first, delay))
        plot_name = f"plot_{name}.csv"
        outputs.append(plot_name)
        flag_sets = {m: set(ts) for m, ts in alert_ts.items()}
        with open(out / plot_name, "w") as fh:
            fh.write("t,value,proposed_alert,ks_alert,wasserstein_alert,psi_alert\n")
            for t in range(len(series)):
                flags = ",".join(
                    str(int(t in flag_sets[m]))
                    for m in ("proposed", "ks", "wasserstein", "psi")
                )
                fh.write(f"{t},{_float_str(series[t])},{flags}\n")
    with open(out / "bench_summary.csv", "w") as fh:
        fh.write("scenario,method,n_alerts,first_alert_t,delay\n")
        for name, method, n, first, delay in summary_rows:
            fh.write(
                f"{name},{method},{n},"
                f"{'' if first is None else first},"
                f"{'' if delay is None else delay}\n"
            )
    manifest = build_manifest(
        "bench", sys.argv[1:] if args.raw_argv is None else args.raw_argv,
        seed, {"n_samples": n_samples, "wasserstein_threshold": w_threshold},
        outputs,
    )
    write_manifest(out, manifest)
    for name, method, n, first, delay in summary_rows:
        print(f"{name} {method}: alerts={n}"
              + (f" first={first}" if first is not None else "")
              + (f" delay={delay}" if delay is not None else ""))
    return EXIT_OK


# -- parser / dispatch -------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="driftwatch",
        description="Streaming drift and anomaly detection toolkit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, *, input_flag=False, preset=False, trace=False):
        p.add_argument("--config", help="config file of section.key = value lines")
        p.add_argument("--seed", type=int, default=None,
                       help=f"RNG seed (overrides config and ${SEED_ENV_VAR})")
        p.add_argument("--out-dir", required=True, help="output directory")
        if input_flag:
            p.add_argument("--input", help="input CSV stream")
        if preset:
            p.add_argument("--preset", choices=["shock", "slow-mean", "periodic", "alt-65"],
                           help="named detector parameter preset")
        if trace:
            p.add_argument("--trace", action="store_true",
                           help="also write a per-step trace.csv")

    p = sub.add_parser("simulate", help="generate a synthetic scenario CSV")
    p.add_argument("--scenario", required=True,
                   choices=sorted(_GENERATORS), help="scenario family")
    add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("detect", help="run the drift detector over a stream")
    add_common(p, input_flag=True, preset=True, trace=True)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("baseline", help="rolling two-sample baseline detection")
    p.add_argument("--method", required=True,
                   choices=["ks", "wasserstein", "psi"])
    p.add_argument("--window", type=int, default=25,
                   help="reference/target window length")
    add_common(p, input_flag=True)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("calibrate-wasserstein",
                       help="derive a Wasserstein alert threshold from null draws")
    add_common(p)
    p.set_defaults(func=cmd_calibrate_wasserstein)

    p = sub.add_parser("train-combiner",
                       help="train the score-fusion MLP on a labeled stream")
    add_common(p, input_flag=True, preset=True)
    p.set_defaults(func=cmd_train_combiner)

    p = sub.add_parser("score-combiner",
                       help="apply a trained fusion model to a scores CSV")
    p.add_argument("--model", help="combiner .npz written by train-combiner")
    add_common(p, input_flag=True)
    p.set_defaults(func=cmd_score_combiner)

    p = sub.add_parser("bench",
                       help="compare detector and baselines on standard scenarios")
    add_common(p)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    args.raw_argv = list(argv) if argv is not None else None
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DriftwatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # pragma: no cover - safety net
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
