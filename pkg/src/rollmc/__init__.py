"""rollmc: accuracy-controlled weighted sampling from a rolling target sequence.

A single MCMC chain is retargeted in place as data batches arrive; its
retained samples live in a bounded weighted database. On each reveal the
stored samples are reweighted (or moved to an enlarged space), a batch-means
accuracy estimate and an ESS-based quality measure drive a control process
that pauses/resumes the chain and resizes the database, and the estimate of
interest is read off the database at any time.
"""

from ._kernels import backend_name
from .accuracy import AccuracyConfig, batch_means_accuracy, conservative_accuracy, control_accuracy
from .analysis import (
    CoverageRow,
    KaplanMeier,
    SampleLifetime,
    coverage_report,
    kaplan_meier,
    rank_interval,
)
from .config import RunConfig, default_config_text, load_config, parse_config_text
from .controller import ControlConfig, ControlState, control_step, quality
from .engine import EngineConfig, RollingEngine, estimate_asymptotic_variance, tune_subsample
from .errors import (
    ConfigError,
    ContractViolationError,
    DegenerateWeightsError,
    PhaseBudgetError,
    RestoreError,
    RollmcError,
)
from .harness import (
    EstimateReport,
    SystemRun,
    build_football_run,
    build_lgm_run,
    build_synthetic_football_run,
    football_events,
    ingest_results,
)
from .store import SampleDatabase, SampleRecord, StoreSnapshot
from .targets import (
    ModelPlugin,
    TargetStep,
    WeightedSample,
    effective_sample_size,
    target_indices,
    weighted_estimate,
    weighted_quantile,
)
from .updater import (
    UpdateOutcome,
    alpha_combined_estimate,
    apply_target_change,
    reweight_and_scale,
    transit_all,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyConfig",
    "ConfigError",
    "ControlConfig",
    "ControlState",
    "ContractViolationError",
    "CoverageRow",
    "DegenerateWeightsError",
    "EngineConfig",
    "EstimateReport",
    "KaplanMeier",
    "ModelPlugin",
    "PhaseBudgetError",
    "RestoreError",
    "RollingEngine",
    "RollmcError",
    "RunConfig",
    "SampleDatabase",
    "SampleLifetime",
    "SampleRecord",
    "StoreSnapshot",
    "SystemRun",
    "TargetStep",
    "UpdateOutcome",
    "WeightedSample",
    "alpha_combined_estimate",
    "apply_target_change",
    "backend_name",
    "batch_means_accuracy",
    "build_football_run",
    "build_lgm_run",
    "build_synthetic_football_run",
    "conservative_accuracy",
    "control_accuracy",
    "control_step",
    "coverage_report",
    "default_config_text",
    "effective_sample_size",
    "estimate_asymptotic_variance",
    "football_events",
    "ingest_results",
    "kaplan_meier",
    "load_config",
    "parse_config_text",
    "quality",
    "rank_interval",
    "reweight_and_scale",
    "target_indices",
    "transit_all",
    "tune_subsample",
    "weighted_estimate",
    "weighted_quantile",
]
