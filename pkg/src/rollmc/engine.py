"""Rolling sampler: one never-restarted chain feeding the sample database.

The chain is retargeted in place on every reveal and merely paused, never
reset, by the control process. A tick performs ``subsample`` raw MCMC steps
and retains the last state; after a target change the first ``burn_in`` ticks
are discarded. Retained states accumulate in a pending buffer and land in the
store as unit-weight records in ``write_batch_size`` groups, each tagged with
the target index that was current when it was produced (its ``info_cutoff``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolationError
from .store import SampleDatabase
from .targets import ModelPlugin, TargetStep


@dataclass(frozen=True)
class EngineConfig:
    """Tick granularity and write batching."""

    burn_in: int = 100
    subsample: int = 1
    write_batch_size: int = 500

    def __post_init__(self) -> None:
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")
        if self.subsample < 1 or self.write_batch_size < 1:
            raise ValueError("subsample and write_batch_size must be >= 1")


class RollingEngine:
    """Drives one MCMC chain and writes retained samples to the store."""

    def __init__(
        self,
        model: ModelPlugin,
        config: EngineConfig,
        step: TargetStep,
        rng: np.random.Generator,
        value: np.ndarray | None = None,
        first_seq: int = 0,
    ):
        self.model = model
        self.config = config
        self.current_step = step
        self.value = np.asarray(
            model.initial_value(rng) if value is None else value, dtype=float
        )
        self.burn_left = config.burn_in
        self.next_seq = int(first_seq)
        self.raw_steps = 0
        self.ticks = 0
        self._pending: list[np.ndarray] = []
        self._pending_seqs: list[int] = []
        self._pending_cutoffs: list[int] = []

    @property
    def pending_count(self) -> int:
        return len(self._pending)

    def on_target_change(self, step: TargetStep, rng: np.random.Generator) -> None:
        """Retarget the chain: flush must have happened; burn-in restarts.

        For a transition target the chain state itself is moved through the
        model's transition law; otherwise it continues from the latest value.
        """
        if self._pending:
            raise ContractViolationError("pending samples must be flushed before retargeting")
        if step.index != self.current_step.index + 1:
            raise ContractViolationError(
                f"engine at target {self.current_step.index} cannot jump to {step.index}"
            )
        if step.requires_transition:
            self.value = np.asarray(self.model.transition(self.value, rng), dtype=float)
        self.current_step = step
        self.burn_left = self.config.burn_in

    def tick(self, store: SampleDatabase, sampler_on: bool, rng: np.random.Generator) -> bool:
        """One tick; returns True when a full write batch was flushed."""
        if not sampler_on:
            return False
        self.value = np.asarray(
            self.model.mcmc_steps(self.value, self.config.subsample, rng), dtype=float
        )
        self.raw_steps += self.config.subsample
        self.ticks += 1
        if self.burn_left > 0:
            self.burn_left -= 1
            return False
        self._pending.append(self.value.copy())
        self._pending_seqs.append(self.next_seq)
        self._pending_cutoffs.append(self.current_step.index)
        self.next_seq += 1
        if len(self._pending) >= self.config.write_batch_size:
            self.flush(store)
            return True
        return False

    def flush(self, store: SampleDatabase) -> int:
        """Write any pending retained samples as unit-weight records."""
        m = len(self._pending)
        if m == 0:
            return 0
        store.insert_batch(
            np.asarray(self._pending),
            np.ones(m),
            np.asarray(self._pending_seqs, dtype=np.int64),
            np.asarray(self._pending_cutoffs, dtype=np.int64),
        )
        self._pending.clear()
        self._pending_seqs.clear()
        self._pending_cutoffs.clear()
        return m

    # -- checkpointing ------------------------------------------------------

    def state_dict(self) -> dict:
        return {
            "value": self.value.tolist(),
            "burn_left": self.burn_left,
            "next_seq": self.next_seq,
            "raw_steps": self.raw_steps,
            "ticks": self.ticks,
            "pending": [v.tolist() for v in self._pending],
            "pending_seqs": list(self._pending_seqs),
            "pending_cutoffs": list(self._pending_cutoffs),
        }

    def load_state_dict(self, state: dict) -> None:
        self.value = np.asarray(state["value"], dtype=float)
        self.burn_left = int(state["burn_left"])
        self.next_seq = int(state["next_seq"])
        self.raw_steps = int(state["raw_steps"])
        self.ticks = int(state["ticks"])
        self._pending = [np.asarray(v, dtype=float) for v in state["pending"]]
        self._pending_seqs = [int(s) for s in state["pending_seqs"]]
        self._pending_cutoffs = [int(c) for c in state["pending_cutoffs"]]


def estimate_asymptotic_variance(chain: np.ndarray, batch_len: int) -> float:
    """Classical batch-means estimate ``b * var(batch means)`` for a scalar chain.

    Uses complete non-overlapping batches only; needs at least two.
    """
    x = np.asarray(chain, dtype=float).ravel()
    if batch_len < 1:
        raise ValueError("batch_len must be >= 1")
    n_batches = len(x) // batch_len
    if n_batches < 2:
        raise ContractViolationError("chain must cover at least two batches")
    means = x[: n_batches * batch_len].reshape(n_batches, batch_len).mean(axis=1)
    return batch_len * float(np.var(means, ddof=1))


def tune_subsample(
    pilot: np.ndarray, target_rho: float = 2.0, min_thinned: int = 1000
) -> int:
    """Smallest thinning stride whose retained chain has rho <= target.

    ``rho`` is the ratio of the asymptotic variance of the thinned chain
    (batch means, batch length ~ sqrt of the thinned length) to its marginal
    variance; ``rho = 1`` for iid draws. Raises when no stride with at least
    ``min_thinned`` retained values reaches the target.
    """
    x = np.asarray(pilot, dtype=float).ravel()
    if len(x) < min_thinned:
        raise ContractViolationError(f"pilot must have at least {min_thinned} values")
    if target_rho <= 0.0:
        raise ValueError("target_rho must be positive")
    for k in range(1, len(x) // min_thinned + 1):
        thinned = x[k - 1 :: k]
        marginal = float(np.var(thinned, ddof=1))
        if marginal == 0.0:
            return k
        b = max(2, int(np.sqrt(len(thinned))))
        rho = estimate_asymptotic_variance(thinned, b) / marginal
        if rho <= target_rho:
            return k
    raise ContractViolationError("pilot too short to reach the target rho")
