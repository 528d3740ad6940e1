"""Weighted-sample primitives and the target-sequence bookkeeping.

A run visits a sequence of posterior targets. Targets are indexed globally by
``n = 1, 2, ...``; each target also carries a pair ``(k, t)`` where ``t`` is
the state (e.g. season) index and ``k`` counts data batches revealed within
that state. ``k = 0`` marks the transition target in which the sample space
itself grows and samples must be moved by the model's transition law rather
than reweighted.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ContractViolationError


@dataclass(frozen=True)
class TargetStep:
    """One target in the rolling sequence.

    Attributes
    ----------
    index : int
        Global 1-based target index ``n``.
    batch_within_state : int
        ``k``, the number of data batches of state ``t`` included (0 for the
        transition target that introduces state ``t``).
    state_index : int
        ``t``, 1-based.
    """

    index: int
    batch_within_state: int
    state_index: int

    def __post_init__(self) -> None:
        if self.index < 1 or self.state_index < 1 or self.batch_within_state < 0:
            raise ValueError(f"invalid target coordinates {self}")

    @property
    def requires_transition(self) -> bool:
        """True when this target extends the sample space (``k = 0``)."""
        return self.batch_within_state == 0


@dataclass
class WeightedSample:
    """A sample value paired with a nonnegative importance weight."""

    value: np.ndarray
    weight: float

    def __post_init__(self) -> None:
        if not np.isfinite(self.weight) or self.weight < 0.0:
            raise ValueError(f"weight must be finite and >= 0, got {self.weight}")


def target_indices(n: int, batch_counts: Sequence[int]) -> tuple[int, int]:
    """Map a global target index to its ``(k, t)`` coordinates.

    ``batch_counts[i]`` is the number of data batches in state ``i + 1``;
    each state contributes ``batch_counts[i] + 1`` targets (its transition
    target plus one per batch). Valid ``n`` run from 1 to
    ``sum(c + 1 for c in batch_counts)``.
    """
    if n < 1:
        raise ValueError(f"target index must be >= 1, got {n}")
    total = 0
    for t, c in enumerate(batch_counts, start=1):
        if c < 0:
            raise ValueError("batch counts must be nonnegative")
        if n - 1 < total + c + 1:
            return n - 1 - total, t
        total += c + 1
    raise ValueError(f"target index {n} exceeds the schedule of {total} targets")


def state_boundaries(batch_counts: Sequence[int]) -> list[int]:
    """Global indices of the transition targets, one per state."""
    out, total = [], 0
    for c in batch_counts:
        out.append(total + 1)
        total += c + 1
    return out


def effective_sample_size(weights: np.ndarray) -> float:
    """``(sum w)^2 / sum w^2``; 0.0 for an empty or all-zero weight vector."""
    w = np.asarray(weights, dtype=float)
    if w.size == 0:
        return 0.0
    if np.any(w < 0.0) or not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite and nonnegative")
    s2 = float(np.dot(w, w))
    if s2 == 0.0:
        return 0.0
    s = float(np.sum(w))
    return s * s / s2


def weighted_estimate(weights: np.ndarray, gvals: np.ndarray) -> np.ndarray:
    """Self-normalized estimate ``sum(w_i g_i) / sum(w_i)``.

    ``gvals`` has one row per sample. Raises if the total weight is zero.
    """
    w = np.asarray(weights, dtype=float)
    g = np.asarray(gvals, dtype=float)
    if g.shape[0] != w.shape[0]:
        raise ValueError("weights and estimand rows disagree")
    total = float(np.sum(w))
    if total <= 0.0 or not np.isfinite(total):
        raise ContractViolationError("weighted estimate is undefined for zero total weight")
    return w @ g / total


def weighted_quantile(values: np.ndarray, weights: np.ndarray, probs: np.ndarray) -> np.ndarray:
    """Weighted sample quantiles via interpolation of the weighted midpoint CDF.

    Reduces to the usual midpoint empirical quantile under equal weights.
    """
    v = np.asarray(values, dtype=float)
    w = np.asarray(weights, dtype=float)
    p = np.atleast_1d(np.asarray(probs, dtype=float))
    if np.any((p < 0.0) | (p > 1.0)):
        raise ValueError("quantile probabilities must lie in [0, 1]")
    keep = w > 0.0
    v, w = v[keep], w[keep]
    if v.size == 0:
        raise ContractViolationError("weighted quantile of an empty sample")
    order = np.argsort(v, kind="stable")
    v, w = v[order], w[order]
    cum = np.cumsum(w)
    grid = (cum - 0.5 * w) / cum[-1]
    return np.interp(p, grid, v)


class ModelPlugin(abc.ABC):
    """Model hooks consumed by the updater, engine and harness.

    Vectorized ``*_many`` variants take an ``(N, dim)`` array of sample
    values; defaults loop over the single-sample hooks, concrete models
    override them with batched implementations.
    """

    name: str = "model"

    @property
    @abc.abstractmethod
    def sample_dimension(self) -> int:
        """Dimension of a sample value under the current target."""

    @property
    @abc.abstractmethod
    def estimand_dimension(self) -> int:
        """Dimension of the estimand vector under the current target."""

    @abc.abstractmethod
    def current_step(self) -> TargetStep:
        """The target the model currently represents."""

    @abc.abstractmethod
    def advance(self, step: TargetStep, payload) -> None:
        """Register the next reveal: a data batch (``k > 0``) or a new state."""

    @abc.abstractmethod
    def initial_value(self, rng: np.random.Generator) -> np.ndarray:
        """A starting chain state for the current target."""

    @abc.abstractmethod
    def mcmc_steps(self, value: np.ndarray, n_steps: int, rng: np.random.Generator) -> np.ndarray:
        """Run ``n_steps`` raw MCMC steps from ``value``; return the final state."""

    def mcmc_step(self, value: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return self.mcmc_steps(value, 1, rng)

    @abc.abstractmethod
    def log_incremental_weight(self, value: np.ndarray, payload) -> float:
        """Log density ratio of the new target to the old at ``value``.

        Only defined for data reveals (the new batch's log likelihood); never
        called for transition targets.
        """

    def log_incremental_weight_many(self, values: np.ndarray, payload) -> np.ndarray:
        return np.array([self.log_incremental_weight(v, payload) for v in values])

    @abc.abstractmethod
    def transition(self, value: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """Move one sample into the enlarged space of a new state."""

    def transition_many(self, values: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        moved = [self.transition(v, rng) for v in values]
        return np.asarray(moved) if moved else np.empty((0, self.sample_dimension))

    @abc.abstractmethod
    def estimand(self, value: np.ndarray, key: int) -> np.ndarray:
        """Per-sample estimand vector ``g_n``; ``key`` identifies the sample."""

    def estimand_many(self, values: np.ndarray, keys: np.ndarray) -> np.ndarray:
        if len(values) == 0:
            return np.empty((0, self.estimand_dimension))
        return np.asarray([self.estimand(v, k) for v, k in zip(values, keys)])

    def estimand_labels(self) -> list[str]:
        return [f"g{i}" for i in range(self.estimand_dimension)]

    def pilot_statistic(self, value: np.ndarray) -> float:
        """Scalar trace used by subsample tuning; defaults to the first coordinate."""
        return float(np.asarray(value).ravel()[0])
