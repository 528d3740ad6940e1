"""Update process: carry the sample database from one target to the next.

Data reveals multiply each stored weight by the new batch's likelihood and
rescale so that the weights sum to their own effective sample size; state
extensions move every sample through the model's transition law instead,
leaving weights untouched. Either way the database switches targets in one
atomic step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolationError, DegenerateWeightsError
from .store import SampleDatabase
from .targets import ModelPlugin, TargetStep, effective_sample_size

WEIGHT_FLOOR = 1e-300


@dataclass(frozen=True)
class UpdateOutcome:
    """What a target change did to the database."""

    kind: str  # "reweighted" | "transited"
    target_index: int
    n_updated: int
    ess_before: float
    ess_after: float


def reweight_and_scale(weights: np.ndarray, log_increments: np.ndarray) -> np.ndarray:
    """Multiply weights by ``exp(log_increments)`` and rescale to ESS.

    Products are formed in the log domain with max subtraction; the common
    scale cancels in the final ``W * sum(W) / sum(W^2)`` form, which makes
    the returned weights sum to their own effective sample size. Entries
    below 1e-300 are clamped to zero. Raises ``DegenerateWeightsError`` when
    nothing survives.
    """
    w = np.asarray(weights, dtype=float)
    lv = np.asarray(log_increments, dtype=float)
    if w.shape != lv.shape:
        raise ValueError("weights and log increments disagree in length")
    if w.size == 0:
        return np.empty(0)
    if np.any(np.isnan(lv)) or np.any(lv == np.inf):
        raise ValueError("log increments must be finite or -inf")
    with np.errstate(divide="ignore"):
        logw = np.log(w)
    log_big = logw + lv
    finite = np.isfinite(log_big)
    if not np.any(finite):
        raise DegenerateWeightsError("all reweighted weights vanished")
    big = np.exp(log_big - np.max(log_big[finite]))
    s1 = float(np.sum(big))
    s2 = float(np.dot(big, big))
    if s2 == 0.0:
        raise DegenerateWeightsError("all reweighted weights vanished")
    scaled = big * (s1 / s2)
    scaled[scaled < WEIGHT_FLOOR] = 0.0
    return scaled


def transit_all(
    db: SampleDatabase, model: ModelPlugin, rng: np.random.Generator
) -> int:
    """Move every stored sample into the model's enlarged sample space."""
    with db.transaction():
        snap = db.snapshot()
        if snap.n:
            moved = model.transition_many(snap.values, rng)
            db.replace_values(snap.production_seqs, moved)
        return snap.n


def apply_target_change(
    db: SampleDatabase,
    model: ModelPlugin,
    step: TargetStep,
    payload,
    rng: np.random.Generator,
) -> UpdateOutcome:
    """Switch the database to ``step`` (the successor of its current target).

    The model must already represent ``step`` (``model.advance`` first). For
    data reveals, records whose ``info_cutoff`` already includes the new
    target were produced against it and are excluded from reweighting.
    """
    with db.transaction():
        if db.target_index and step.index != db.target_index + 1:
            raise ContractViolationError(
                f"target {step.index} is not the successor of {db.target_index}"
            )
        snap = db.snapshot()
        if step.requires_transition:
            n_moved = transit_all(db, model, rng)
            ess = effective_sample_size(snap.weights)
            db.set_target_index(step.index)
            return UpdateOutcome("transited", step.index, n_moved, ess, ess)
        stale = snap.info_cutoffs < step.index
        ess_before = effective_sample_size(snap.weights[stale])
        if np.any(stale):
            log_v = model.log_incremental_weight_many(snap.values[stale], payload)
            new_w = snap.weights.copy()
            new_w[stale] = reweight_and_scale(snap.weights[stale], log_v)
            db.set_weights(snap.production_seqs, new_w)
            ess_after = effective_sample_size(new_w[stale])
        else:
            ess_after = ess_before
        db.set_target_index(step.index)
        return UpdateOutcome("reweighted", step.index, int(np.sum(stale)), ess_before, ess_after)


def alpha_combined_estimate(
    ess_old: float,
    estimate_old: np.ndarray,
    n_new: int,
    estimate_new: np.ndarray,
) -> np.ndarray:
    """Blend an old reweighted block with a block of fresh unit-weight samples.

    ``alpha = ESS_old / (ESS_old + n_new)``; because scaled old weights sum
    to their ESS, this equals the plain weighted estimate over the union.
    """
    alpha = ess_old / (ess_old + n_new)
    return alpha * np.asarray(estimate_old, dtype=float) + (1.0 - alpha) * np.asarray(
        estimate_new, dtype=float
    )
