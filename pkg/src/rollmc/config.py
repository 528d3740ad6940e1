"""Flat ``key = value`` run configuration.

One key per tunable, every key has a documented default, unknown keys are
errors. Lines starting with ``#`` and blank lines are ignored; values never
contain newlines. ``batch_lengths`` takes a comma-separated list.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .accuracy import AccuracyConfig
from .controller import ControlConfig
from .engine import EngineConfig
from .errors import ConfigError


def _parse_bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _parse_float_list(raw: str) -> tuple[float, ...]:
    vals = tuple(float(part) for part in raw.split(",") if part.strip())
    if not vals:
        raise ValueError("empty list")
    return vals


def _parse_mode(raw: str) -> str:
    if raw not in ("deterministic", "threads"):
        raise ValueError(f"mode must be deterministic or threads, got {raw!r}")
    return raw


def _parse_batch_mode(raw: str) -> str:
    if raw not in ("single", "7d", "30d"):
        raise ValueError(f"batch mode must be single, 7d or 30d, got {raw!r}")
    return raw


# key -> (parser, default, description)
KEY_TABLE = {
    # control thresholds and sizing
    "beta1": (float, 0.01, "accuracy below this (with N >= n_min) pauses the sampler"),
    "beta2": (float, 0.0125, "accuracy above this resumes the sampler"),
    "gamma1": (float, 0.1, "quality below this flags weight degeneracy"),
    "gamma2": (float, 0.75, "quality above this grows the capacity"),
    "n_min": (int, 1000, "database capacity floor"),
    "n_max_init": (int, 20000, "initial database capacity"),
    "resize_fraction": (float, 0.10, "relative capacity step for grow/shrink"),
    # sampler
    "burn_in": (int, 100, "ticks discarded after every target change"),
    "subsample": (int, 1, "raw MCMC steps per retained sample"),
    "write_batch_size": (int, 500, "retained samples per store flush"),
    # accuracy estimator
    "batch_lengths": (_parse_float_list, (10.0, 50.0), "weight-mass batch lengths"),
    "min_batches": (int, 20, "below this interval count the accuracy is the -1 sentinel"),
    # scheduler
    "mode": (_parse_mode, "deterministic", "deterministic scheduler or four threaded workers"),
    "init_batches": (int, 0, "leading reveal events ingested before sampling starts"),
    "max_ticks_per_phase": (int, 2_000_000, "tick budget between reveals before aborting"),
    "poll_interval": (float, 0.001, "worker sleep in threads mode, seconds"),
    "checkpoint_every": (int, 0, "save a checkpoint every this many reveals (0: end only)"),
    # model presets
    "lgm_states": (int, 3, "states revealed by the linear-Gaussian preset"),
    "synth_teams": (int, 6, "teams in the generated league"),
    "synth_seasons": (int, 2, "seasons in the generated league"),
    "synth_relegated": (int, 2, "relegations per generated season"),
    "synth_seed": (int, 0, "seed of the generated data set (separate from the run seed)"),
    "synth_round_days": (int, 7, "days between rounds of the generated league"),
    "batch_mode": (_parse_batch_mode, "7d", "football result batching: single, 7d or 30d"),
    "sample_theta": (_parse_bool, True, "sample the football parameters (else freeze)"),
    "prediction_salt": (int, 0, "extra salt for the fixture-simulation hash"),
}


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse flat key-value lines into a fully-defaulted mapping."""
    values = {key: default for key, (_, default, _) in KEY_TABLE.items()}
    for ln, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{source}: line {ln}: expected 'key = value'")
        key, _, raw = line.partition("=")
        key = key.strip()
        if key not in KEY_TABLE:
            raise ConfigError(f"{source}: line {ln}: unknown key {key!r}")
        parser = KEY_TABLE[key][0]
        try:
            values[key] = parser(raw.strip())
        except ValueError as exc:
            raise ConfigError(f"{source}: line {ln}: bad value for {key}: {exc}") from exc
    return values


def load_config(path) -> "RunConfig":
    with open(path) as fh:
        text = fh.read()
    return RunConfig.from_mapping(parse_config_text(text, source=str(path)))


def default_config_text() -> str:
    """Render every key with its default and description."""
    lines = ["# rollmc run configuration (defaults shown)"]
    for key, (_, default, desc) in KEY_TABLE.items():
        if isinstance(default, tuple):
            rendered = ",".join(str(v) for v in default)
        elif isinstance(default, bool):
            rendered = "true" if default else "false"
        else:
            rendered = str(default)
        lines.append(f"# {desc}")
        lines.append(f"{key} = {rendered}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class RunConfig:
    """Everything a run needs besides the model, data, seed and paths."""

    control: ControlConfig = field(default_factory=ControlConfig)
    engine: EngineConfig = field(default_factory=EngineConfig)
    accuracy: AccuracyConfig = field(default_factory=AccuracyConfig)
    mode: str = "deterministic"
    init_batches: int = 0
    max_ticks_per_phase: int = 2_000_000
    poll_interval: float = 0.001
    checkpoint_every: int = 0
    lgm_states: int = 3
    synth_teams: int = 6
    synth_seasons: int = 2
    synth_relegated: int = 2
    synth_seed: int = 0
    synth_round_days: int = 7
    batch_mode: str = "7d"
    sample_theta: bool = True
    prediction_salt: int = 0

    def __post_init__(self):
        if self.init_batches < 0 or self.max_ticks_per_phase < 1:
            raise ConfigError("init_batches must be >= 0 and max_ticks_per_phase >= 1")
        if self.checkpoint_every < 0:
            raise ConfigError("checkpoint_every must be >= 0")

    @classmethod
    def from_mapping(cls, values: dict) -> "RunConfig":
        try:
            control = ControlConfig(
                beta1=values["beta1"], beta2=values["beta2"],
                gamma1=values["gamma1"], gamma2=values["gamma2"],
                n_min=values["n_min"], n_max_init=values["n_max_init"],
                resize_fraction=values["resize_fraction"],
            )
            engine = EngineConfig(
                burn_in=values["burn_in"], subsample=values["subsample"],
                write_batch_size=values["write_batch_size"],
            )
            accuracy = AccuracyConfig(
                batch_lengths=tuple(values["batch_lengths"]),
                min_batches=values["min_batches"],
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return cls(
            control=control, engine=engine, accuracy=accuracy,
            mode=values["mode"], init_batches=values["init_batches"],
            max_ticks_per_phase=values["max_ticks_per_phase"],
            poll_interval=values["poll_interval"],
            checkpoint_every=values["checkpoint_every"],
            lgm_states=values["lgm_states"], synth_teams=values["synth_teams"],
            synth_seasons=values["synth_seasons"],
            synth_relegated=values["synth_relegated"], synth_seed=values["synth_seed"],
            synth_round_days=values["synth_round_days"],
            batch_mode=values["batch_mode"], sample_theta=values["sample_theta"],
            prediction_salt=values["prediction_salt"],
        )

    def overridden(self, **overrides) -> "RunConfig":
        values = {key: default for key, (_, default, _) in KEY_TABLE.items()}
        values.update(
            beta1=self.control.beta1, beta2=self.control.beta2,
            gamma1=self.control.gamma1, gamma2=self.control.gamma2,
            n_min=self.control.n_min, n_max_init=self.control.n_max_init,
            resize_fraction=self.control.resize_fraction,
            burn_in=self.engine.burn_in, subsample=self.engine.subsample,
            write_batch_size=self.engine.write_batch_size,
            batch_lengths=self.accuracy.batch_lengths,
            min_batches=self.accuracy.min_batches,
            mode=self.mode, init_batches=self.init_batches,
            max_ticks_per_phase=self.max_ticks_per_phase,
            poll_interval=self.poll_interval, checkpoint_every=self.checkpoint_every,
            lgm_states=self.lgm_states, synth_teams=self.synth_teams,
            synth_seasons=self.synth_seasons, synth_relegated=self.synth_relegated,
            synth_seed=self.synth_seed, synth_round_days=self.synth_round_days,
            batch_mode=self.batch_mode,
            sample_theta=self.sample_theta, prediction_salt=self.prediction_salt,
        )
        unknown = set(overrides) - set(values)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        values.update(overrides)
        return RunConfig.from_mapping(values)
