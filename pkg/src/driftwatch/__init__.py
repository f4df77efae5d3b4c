"""driftwatch: streaming drift and anomaly detection.

An online detector built from a sparse predictive sequence model (encoder,
spatial pooler, temporal memory), a rolling-std error rescaler, and a
restarting Bernoulli sequential probability-ratio test, plus classical
two-sample baselines (Kolmogorov–Smirnov, Wasserstein-1, PSI), seeded
synthetic scenario generators, and a small from-scratch MLP that fuses
per-channel scores into a single decision.
"""

from .errors import (
    DriftwatchError,
    InputError,
    ConfigError,
    GenerationError,
    ScoringError,
)
from .htm import EncoderConfig, PoolerConfig, TemporalConfig, HtmCore, Sdr, encode
from .rescale import RollingWindow, rescale_score, sample_std
from .sprt import Decision, SprtConfig, SprtMonitor, sprt_limits, binarize, combine_decisions
from .pipeline import (
    DriftEvent,
    DriftWindow,
    EventKind,
    HtmSprtDetector,
    drift_windows,
    run_stream,
)
from .baselines import (
    ks_statistic,
    ks_pvalue,
    ks_test,
    wasserstein_distance,
    calibrate_psi_threshold,
    calibrate_wasserstein_threshold,
    psi,
    psi_critical_value,
    rolling_drift_detect,
    RollingBaselineDetector,
)
from .datagen import (
    Scenario,
    gen_periodic,
    gen_monotonic_cubic,
    gen_abrupt,
    gen_no_drift,
    gen_labeled_multivariate,
    write_scenario,
    read_scenario,
)
from .combiner import MlpCombiner

__version__ = "0.1.0"

__all__ = [
    "DriftwatchError",
    "InputError",
    "ConfigError",
    "GenerationError",
    "ScoringError",
    "EncoderConfig",
    "PoolerConfig",
    "TemporalConfig",
    "HtmCore",
    "Sdr",
    "encode",
    "RollingWindow",
    "rescale_score",
    "sample_std",
    "Decision",
    "SprtConfig",
    "SprtMonitor",
    "sprt_limits",
    "binarize",
    "combine_decisions",
    "DriftEvent",
    "DriftWindow",
    "EventKind",
    "HtmSprtDetector",
    "drift_windows",
    "run_stream",
    "ks_statistic",
    "ks_pvalue",
    "ks_test",
    "wasserstein_distance",
    "calibrate_psi_threshold",
    "calibrate_wasserstein_threshold",
    "psi_critical_value",
    "psi",
    "rolling_drift_detect",
    "RollingBaselineDetector",
    "Scenario",
    "gen_periodic",
    "gen_monotonic_cubic",
    "gen_abrupt",
    "gen_no_drift",
    "gen_labeled_multivariate",
    "write_scenario",
    "read_scenario",
    "MlpCombiner",
    "__version__",
]
