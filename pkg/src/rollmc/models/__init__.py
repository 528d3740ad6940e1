"""Model plugins: linear-Gaussian state space and the football league."""

from .football import (
    BATCH_MODES,
    FootballConfig,
    FootballModel,
    MatchResult,
    SeasonIntro,
    SyntheticLeague,
    Theta,
    group_batches,
    rank_matrix,
    rank_table,
    read_results_csv,
    round_robin_rounds,
    simulate_match,
    synthetic_league,
    write_results_csv,
)
from .lgm import (
    LgmModel,
    LgmSpec,
    ObservationBatch,
    desk_spec,
    full_spec,
    kalman_filter,
    lgm_simulate,
    posterior_moments,
    reveal_schedule,
)

__all__ = [
    "BATCH_MODES",
    "FootballConfig",
    "FootballModel",
    "MatchResult",
    "SeasonIntro",
    "SyntheticLeague",
    "Theta",
    "group_batches",
    "rank_matrix",
    "rank_table",
    "read_results_csv",
    "round_robin_rounds",
    "simulate_match",
    "synthetic_league",
    "write_results_csv",
    "LgmModel",
    "LgmSpec",
    "ObservationBatch",
    "desk_spec",
    "full_spec",
    "kalman_filter",
    "lgm_simulate",
    "posterior_moments",
    "reveal_schedule",
]
