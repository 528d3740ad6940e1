"""Post-run evaluation: sample survival curves and rank interval coverage.

Stored samples live for some number of data batches before the deletion
policy removes them; a run's end right-censors whatever is still alive.
The product-limit estimator turns those lifetimes into a survival curve.
Rank predictions are summarized by central conservative intervals whose
contained mass can then be compared with realized outcomes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolationError


@dataclass(frozen=True)
class SampleLifetime:
    """Batches a sample survived; censored means it outlived the run."""

    batches_survived: int
    censored: bool = False

    def __post_init__(self):
        if self.batches_survived < 0:
            raise ValueError("lifetimes are nonnegative")


@dataclass(frozen=True)
class KaplanMeier:
    """Product-limit survival estimate as a right-continuous step function.

    One entry per distinct observed lifetime; ``survival[i]`` is S(times[i]),
    the probability of living strictly beyond ``times[i]`` batches.
    """

    times: np.ndarray
    survival: np.ndarray
    at_risk: np.ndarray
    events: np.ndarray

    def __call__(self, u) -> np.ndarray | float:
        u = np.asarray(u, dtype=float)
        idx = np.searchsorted(self.times, u, side="right")
        vals = np.concatenate([[1.0], self.survival])[idx]
        return float(vals) if vals.ndim == 0 else vals


def kaplan_meier(lifetimes) -> KaplanMeier:
    """Estimate the survival function of sample lifetimes.

    Censored records enter risk sets but never count as deletions; ties
    between a deletion and a censoring at the same time keep the censored
    sample at risk.
    """
    lifetimes = list(lifetimes)
    if not lifetimes:
        raise ContractViolationError("need at least one lifetime")
    t = np.array([lf.batches_survived for lf in lifetimes], dtype=float)
    dead = np.array([not lf.censored for lf in lifetimes])
    times = np.unique(t)
    at_risk = np.array([int(np.sum(t >= u)) for u in times])
    events = np.array([int(np.sum(dead & (t == u))) for u in times])
    surv = np.cumprod(1.0 - events / at_risk)
    return KaplanMeier(times, surv, at_risk, events)


def rank_interval(dist_row, level: float) -> tuple[int, int]:
    """Smallest central closed rank interval holding at least ``level`` mass.

    ``lo`` is the largest rank whose below-mass stays within the (1-level)/2
    tail; ``hi`` mirrors it from above. Discreteness makes the contained
    mass overshoot the level, never undershoot.
    """
    p = np.asarray(dist_row, dtype=float)
    if not 0.0 < level < 1.0:
        raise ContractViolationError("level must lie in (0, 1)")
    if p.ndim != 1 or np.any(p < -1e-12) or abs(p.sum() - 1.0) > 1e-9:
        raise ContractViolationError("rank distribution must be a probability vector")
    n = len(p)
    tail = (1.0 - level) / 2.0 + 1e-12
    below = np.concatenate([[0.0], np.cumsum(p)])
    above = below[n] - below
    lo = int(np.max(np.nonzero(below[:n] <= tail)[0])) + 1
    hi = int(np.min(np.nonzero(above[1:] <= tail)[0])) + 1
    while below[n] - below[lo - 1] - above[hi] < level and (lo > 1 or hi < n):
        # float-boundary safety net; the rule itself is conservative
        if lo > 1 and (hi == n or p[lo - 2] >= p[hi]):
            lo -= 1
        else:
            hi += 1
    return lo, hi


def interval_mass(dist_row, lo: int, hi: int) -> float:
    p = np.asarray(dist_row, dtype=float)
    return float(np.sum(p[lo - 1 : hi]))


@dataclass(frozen=True)
class CoverageRow:
    level: float
    avg_mass: float
    realized_coverage: float


def coverage_report(dist_rows, true_ranks, levels=(0.5, 0.95)) -> list[CoverageRow]:
    """Interval quality against realized outcomes.

    For each level, builds the conservative interval of every distribution
    row and reports the average posterior mass the intervals contain and the
    fraction of realized ranks falling inside (boundaries count as covered).
    """
    rows = [np.asarray(r, dtype=float) for r in dist_rows]
    truths = [int(r) for r in true_ranks]
    if len(rows) != len(truths):
        raise ContractViolationError("one realized rank per distribution row")
    if not rows:
        raise ContractViolationError("need at least one prediction")
    out = []
    for level in levels:
        masses, hits = [], []
        for p, true_rank in zip(rows, truths):
            lo, hi = rank_interval(p, level)
            masses.append(interval_mass(p, lo, hi))
            hits.append(lo <= true_rank <= hi)
        out.append(CoverageRow(float(level), float(np.mean(masses)), float(np.mean(hits))))
    return out


def write_survival_csv(path, km: KaplanMeier) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["u", "survival", "at_risk", "events"])
        for u, s, n, d in zip(km.times, km.survival, km.at_risk, km.events):
            writer.writerow([int(u), f"{s:.10g}", int(n), int(d)])


def read_survival_csv(path) -> KaplanMeier:
    data = np.genfromtxt(path, delimiter=",", names=True)
    data = np.atleast_1d(data)
    return KaplanMeier(
        data["u"].astype(float), data["survival"].astype(float),
        data["at_risk"].astype(np.int64), data["events"].astype(np.int64),
    )


def write_coverage_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["level", "avg_mass", "realized_coverage"])
        for row in rows:
            writer.writerow([row.level, f"{row.avg_mass:.10g}", f"{row.realized_coverage:.10g}"])
