"""Accuracy of the running estimate, via weighted batch means.

The cumulative weight axis is cut into ``L = ceil(sum(w) / b)`` intervals of
mass ``b``; sample ``u`` contributes to interval ``i`` the overlap
``kappa_i(u)`` between its own mass segment and the interval. Per-interval
weighted means stand in for classical batch means.

``batch_means_accuracy`` returns the spread of those interval means: the SD
of one interval mean. ``control_accuracy`` additionally divides by sqrt(L),
giving an estimate of the SD of the overall weighted estimate, which is the
quantity the control process thresholds; it shrinks as samples accumulate,
the per-interval spread does not.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ContractViolationError

SENTINEL = -1.0


@dataclass(frozen=True)
class AccuracyConfig:
    """Batch lengths (in weight mass) and the minimum interval count."""

    batch_lengths: tuple[float, ...] = (10.0, 50.0)
    min_batches: int = 20

    def __post_init__(self) -> None:
        if not self.batch_lengths or any(b <= 0 for b in self.batch_lengths):
            raise ValueError("batch lengths must be positive")
        if self.min_batches < 2:
            raise ValueError("min_batches must be >= 2")


def batch_weight(weights: np.ndarray, u: int, i: int, b: float) -> float:
    """Mass of sample ``u`` falling in interval ``i`` (both 1-based).

    ``[min(D_u, i b) - max(D_{u-1}, (i-1) b)]^+`` with ``D`` the cumulative
    weights. Reference form; the splitting kernel computes the same overlap.
    """
    w = np.asarray(weights, dtype=float)
    if not 1 <= u <= len(w):
        raise ValueError("sample index out of range")
    d_u = float(np.sum(w[:u]))
    d_prev = d_u - float(w[u - 1])
    return max(0.0, min(d_u, i * b) - max(d_prev, (i - 1) * b))


def _interval_means(weights, gvals, b):
    """Interval means after merging an underweight final interval."""
    sums, masses, n_intervals = _kernels.batch_interval_sums(weights, gvals, b)
    if len(masses) >= 2 and masses[-1] < 0.5 * b:
        sums[-2] += sums[-1]
        masses[-2] += masses[-1]
        sums, masses = sums[:-1], masses[:-1]
    return sums, masses, n_intervals


def batch_means_accuracy(
    weights: np.ndarray, gvals: np.ndarray, b: float
) -> tuple[np.ndarray, int]:
    """Per-component SD of the interval means, and ``L = ceil(sum(w)/b)``.

    A final interval holding less than half a batch of mass is merged into
    its neighbor; an interval with no mass contributes the grand mean (zero
    deviation) but still counts in the divisor.
    """
    w = np.asarray(weights, dtype=float)
    g = np.atleast_2d(np.asarray(gvals, dtype=float))
    if g.shape[0] != w.shape[0]:
        raise ValueError("weights and estimand rows disagree")
    if float(np.sum(w)) <= 0.0:
        raise ContractViolationError("batch means need positive total weight")
    sums, masses, n_intervals = _interval_means(w, g, b)
    occupied = masses > 0.0
    means = sums[occupied] / masses[occupied, None]
    grand = means.mean(axis=0)
    dev2 = ((means - grand) ** 2).sum(axis=0) / len(masses)
    return np.sqrt(dev2), n_intervals


def _max_accuracy(weights, gvals, config, per_estimator):
    w = np.asarray(weights, dtype=float)
    total = float(np.sum(w)) if w.size else 0.0
    if total <= 0.0:
        return SENTINEL
    b_top = max(config.batch_lengths)
    if int(np.ceil(total / b_top)) < config.min_batches:
        return SENTINEL
    g = np.atleast_2d(np.asarray(gvals, dtype=float))
    worst = 0.0
    for b in config.batch_lengths:
        sums, masses, _ = _interval_means(w, g, b)
        occupied = masses > 0.0
        means = sums[occupied] / masses[occupied, None]
        grand = means.mean(axis=0)
        dev2 = ((means - grand) ** 2).sum(axis=0) / len(masses)
        if per_estimator:
            dev2 = dev2 / len(masses)
        worst = max(worst, float(np.sqrt(np.max(dev2))))
    return worst


def conservative_accuracy(weights: np.ndarray, gvals: np.ndarray, config: AccuracyConfig) -> float:
    """Max interval-mean SD over components and batch lengths.

    Returns the -1.0 sentinel when fewer than ``min_batches`` intervals exist
    at the largest batch length (or the store is empty / weightless).
    """
    return _max_accuracy(weights, gvals, config, per_estimator=False)


def control_accuracy(weights: np.ndarray, gvals: np.ndarray, config: AccuracyConfig) -> float:
    """Max estimated estimator SD over components and batch lengths.

    Same sweep as ``conservative_accuracy`` with each per-length value divided
    by sqrt(number of intervals), estimating the SD of the weighted estimate
    itself. Same sentinel rule.
    """
    return _max_accuracy(weights, gvals, config, per_estimator=True)
