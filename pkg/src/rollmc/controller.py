"""Control process: pause/resume the sampler and resize the database.

``control_step`` is a pure function. Its four conditions are evaluated in
order against a mutable copy of the state, so a later condition sees the
effect of an earlier one within the same step:

1. accuracy below the lower threshold (and enough samples) -> pause;
2. accuracy above the upper threshold, or paused with poor quality at the
   floor size -> resume;
3. paused with poor quality above the floor -> shrink the capacity;
4. running with high quality -> grow the capacity.

An accuracy sentinel of -1 (too few batch-means intervals) short-circuits to
replenishment: capacity drops to the floor and the sampler resumes, so stale
mass is deleted and replaced by fresh samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .accuracy import SENTINEL


@dataclass(frozen=True)
class ControlConfig:
    """Thresholds for accuracy (beta) and quality (gamma), plus sizing."""

    beta1: float = 0.01
    beta2: float = 0.0125
    gamma1: float = 0.1
    gamma2: float = 0.75
    n_min: int = 1000
    n_max_init: int = 20000
    resize_fraction: float = 0.10

    def __post_init__(self) -> None:
        if not 0.0 < self.beta1 < self.beta2:
            raise ValueError("need 0 < beta1 < beta2")
        if not 0.0 < self.gamma1 < self.gamma2:
            raise ValueError("need 0 < gamma1 < gamma2")
        if self.n_min < 1 or self.n_max_init < self.n_min:
            raise ValueError("need 1 <= n_min <= n_max_init")
        if not 0.0 < self.resize_fraction < 1.0:
            raise ValueError("resize_fraction must lie in (0, 1)")


@dataclass(frozen=True)
class ControlState:
    """Whether the sampler runs, and the current capacity cap."""

    sampler_on: bool
    n_max: int


def quality(ess: float, n_max: int) -> float:
    """Effective sample size as a fraction of capacity."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if ess < 0.0:
        raise ValueError("ess must be >= 0")
    return ess / n_max


def control_step(
    accuracy: float,
    qual: float,
    n: int,
    state: ControlState,
    config: ControlConfig,
) -> tuple[ControlState, tuple[str, ...]]:
    """Apply one control evaluation; returns the new state and fired actions.

    ``accuracy`` is the controlled accuracy estimate (or the -1 sentinel),
    ``qual`` the quality and ``n`` the current record count.
    """
    if accuracy == SENTINEL:
        new = ControlState(sampler_on=True, n_max=config.n_min)
        return new, ("replenish",)
    if accuracy < 0.0 or not math.isfinite(accuracy):
        raise ValueError(f"accuracy must be nonnegative or the sentinel, got {accuracy}")
    actions: list[str] = []
    cur = state
    if accuracy < config.beta1 and n >= config.n_min:
        cur = replace(cur, sampler_on=False)
        actions.append("pause")
    if accuracy > config.beta2 or (
        not cur.sampler_on and qual < config.gamma1 and n == config.n_min
    ):
        cur = replace(cur, sampler_on=True)
        actions.append("resume")
    if not cur.sampler_on and qual < config.gamma1 and n > config.n_min:
        shrunk = max(config.n_min, math.floor(cur.n_max * (1.0 - config.resize_fraction)))
        cur = replace(cur, n_max=shrunk)
        actions.append("shrink")
    if cur.sampler_on and qual > config.gamma2:
        cur = replace(cur, n_max=math.ceil(cur.n_max * (1.0 + config.resize_fraction)))
        actions.append("grow")
    return cur, tuple(actions)
