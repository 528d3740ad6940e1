"""Linear-Gaussian state chain with partially revealed observation rows.

States follow ``X_1 ~ N(mu0, Sigma0)``, ``X_t = A X_{t-1} + N(0, Sigma)``.
Every state owes the same block of observation rows ``Y = B X_t + N(0, xi)``
(``xi`` diagonal), revealed a few rows at a time, so the posterior is refined
batch by batch and extended by one state at each transition target.

Because everything is jointly Gaussian the exact posterior is available from
Kalman filtering plus backward smoothing; those recursions live here as the
reference answer the rolling sampler is judged against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import _kernels
from ..errors import ContractViolationError
from ..targets import ModelPlugin, TargetStep

LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class LgmSpec:
    """Model constants: dynamics, observation design and noise levels."""

    a: np.ndarray
    sigma: np.ndarray
    mu0: np.ndarray
    sigma0: np.ndarray
    b: np.ndarray
    xi: np.ndarray
    n_states: int
    rows_per_batch: int

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        d = a.shape[0]
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "sigma", np.asarray(self.sigma, dtype=float))
        object.__setattr__(self, "mu0", np.asarray(self.mu0, dtype=float).ravel())
        object.__setattr__(self, "sigma0", np.asarray(self.sigma0, dtype=float))
        object.__setattr__(self, "b", np.asarray(self.b, dtype=float))
        object.__setattr__(self, "xi", np.asarray(self.xi, dtype=float).ravel())
        if a.shape != (d, d) or self.sigma.shape != (d, d) or self.sigma0.shape != (d, d):
            raise ValueError("a, sigma and sigma0 must be square and same size")
        if self.mu0.shape != (d,):
            raise ValueError("mu0 length must match the state dimension")
        if self.b.ndim != 2 or self.b.shape[1] != d:
            raise ValueError("b must have one column per state component")
        if self.xi.shape != (self.b.shape[0],):
            raise ValueError("xi must hold one variance per observation row")
        if np.any(self.xi <= 0.0):
            raise ValueError("observation variances must be positive")
        np.linalg.cholesky(self.sigma)
        np.linalg.cholesky(self.sigma0)
        if self.n_states < 1:
            raise ValueError("n_states must be >= 1")
        if self.rows_per_batch < 1 or self.b.shape[0] % self.rows_per_batch:
            raise ValueError("rows_per_batch must evenly divide the row count")

    @property
    def dim(self) -> int:
        return self.a.shape[0]

    @property
    def n_rows(self) -> int:
        return self.b.shape[0]

    @property
    def batches_per_state(self) -> int:
        return self.n_rows // self.rows_per_batch

    def batch_counts(self) -> list[int]:
        return [self.batches_per_state] * self.n_states


def _cycle_pairs(dim: int) -> list[tuple[int, int]]:
    # two directed Hamiltonian cycles and their reversals: every node appears
    # once as source and once as sink within each cycle, so each cycle's rows
    # touch every state component
    step2 = [(2 * i) % dim for i in range(dim)]
    cycles = [list(range(dim)), step2, list(reversed(range(dim))), list(reversed(step2))]
    pairs = []
    for cyc in cycles:
        pairs.extend((cyc[i], cyc[(i + 1) % dim]) for i in range(dim))
    return pairs


def _design_rows(pairs, dim: int) -> np.ndarray:
    b = np.zeros((len(pairs), dim))
    for r, (h, a) in enumerate(pairs):
        b[r, h] = 2.0
        b[r, a] = 1.0
    return b


def desk_spec(n_states: int = 3) -> LgmSpec:
    """Small five-component instance whose reveal batches each cover every
    component (rows grouped as directed Hamiltonian cycles)."""
    d = 5
    a = 0.7 * (np.eye(d) - np.ones((d, d)) / d)
    return LgmSpec(
        a=a,
        sigma=0.05 * np.eye(d),
        mu0=np.zeros(d),
        sigma0=np.eye(d),
        b=_design_rows(_cycle_pairs(d), d),
        xi=np.full(4 * d, 0.02),
        n_states=n_states,
        rows_per_batch=d,
    )


def full_spec(n_states: int = 10, rows_per_batch: int = 19) -> LgmSpec:
    """Twenty-component instance with one row per ordered component pair."""
    d = 20
    a = 0.7 * (np.eye(d) - np.ones((d, d)) / d)
    pairs = [(h, w) for h in range(d) for w in range(d) if w != h]
    return LgmSpec(
        a=a,
        sigma=0.05 * np.eye(d),
        mu0=np.zeros(d),
        sigma0=np.eye(d),
        b=_design_rows(pairs, d),
        xi=np.full(len(pairs), 0.02),
        n_states=n_states,
        rows_per_batch=rows_per_batch,
    )


@dataclass(frozen=True)
class ObservationBatch:
    """One revealed group of observation rows for a single state."""

    state_index: int
    rows: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rows", np.asarray(self.rows, dtype=np.int64))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.rows.shape != self.values.shape or self.rows.ndim != 1:
            raise ValueError("rows and values must be matching vectors")
        if self.state_index < 1:
            raise ValueError("state_index is 1-based")


def lgm_simulate(spec: LgmSpec, rng: np.random.Generator):
    """Draw a trajectory and the full observation table, one row set per state."""
    d, t = spec.dim, spec.n_states
    lq = np.linalg.cholesky(spec.sigma)
    states = np.empty((t, d))
    states[0] = spec.mu0 + np.linalg.cholesky(spec.sigma0) @ rng.standard_normal(d)
    for s in range(1, t):
        states[s] = spec.a @ states[s - 1] + lq @ rng.standard_normal(d)
    noise = rng.standard_normal((t, spec.n_rows)) * np.sqrt(spec.xi)
    obs = states @ spec.b.T + noise
    return states, obs


def reveal_schedule(spec: LgmSpec, obs: np.ndarray):
    """Target-by-target payloads from index 2 on (index 1 births state one)."""
    events: list[tuple[TargetStep, ObservationBatch | None]] = []
    n = 1
    for t in range(1, spec.n_states + 1):
        if t > 1:
            n += 1
            events.append((TargetStep(n, 0, t), None))
        for k in range(1, spec.batches_per_state + 1):
            rows = np.arange((k - 1) * spec.rows_per_batch, k * spec.rows_per_batch)
            n += 1
            events.append(
                (TargetStep(n, k, t), ObservationBatch(t, rows, obs[t - 1, rows]))
            )
    return events


# -- exact reference recursions ----------------------------------------------


def kalman_update(mean, cov, b_rows, xi_rows, y):
    """Condition a Gaussian on rows ``y = b_rows x + N(0, diag(xi_rows))``.

    Joseph-form covariance update; with a diagonal noise this composes, so
    applying rows in chunks matches applying them all at once.
    """
    b = np.atleast_2d(np.asarray(b_rows, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    xi = np.asarray(xi_rows, dtype=float).ravel()
    if len(y) == 0:
        return np.array(mean, dtype=float), np.array(cov, dtype=float)
    s = b @ cov @ b.T + np.diag(xi)
    gain = np.linalg.solve(s, b @ cov).T
    mean = mean + gain @ (y - b @ mean)
    shrink = np.eye(len(mean)) - gain @ b
    cov = shrink @ cov @ shrink.T + (gain * xi) @ gain.T
    return mean, cov


def kalman_filter(spec: LgmSpec, revealed, n_states: int):
    """Filtered moments given per-state revealed rows.

    ``revealed[s]`` is ``(rows, values)`` with global row indices into the
    design block; states with nothing revealed pass ``(empty, empty)``.
    """
    means = np.empty((n_states, spec.dim))
    covs = np.empty((n_states, spec.dim, spec.dim))
    mean, cov = spec.mu0, spec.sigma0
    for s in range(n_states):
        if s > 0:
            mean = spec.a @ mean
            cov = spec.a @ cov @ spec.a.T + spec.sigma
        rows, vals = revealed[s]
        rows = np.asarray(rows, dtype=np.int64)
        mean, cov = kalman_update(mean, cov, spec.b[rows], spec.xi[rows], vals)
        means[s], covs[s] = mean, cov
    return means, covs


def rts_smooth(spec: LgmSpec, means, covs):
    """Backward pass turning filtered moments into smoothed ones."""
    sm = np.array(means, dtype=float)
    sc = np.array(covs, dtype=float)
    for s in range(len(sm) - 2, -1, -1):
        pred_cov = spec.a @ covs[s] @ spec.a.T + spec.sigma
        gain = np.linalg.solve(pred_cov, spec.a @ covs[s]).T
        sm[s] = means[s] + gain @ (sm[s + 1] - spec.a @ means[s])
        sc[s] = covs[s] + gain @ (sc[s + 1] - pred_cov) @ gain.T
    return sm, sc


def posterior_moments(spec: LgmSpec, revealed, n_states: int):
    """Smoothed posterior means/covariances for the given reveal pattern."""
    return rts_smooth(spec, *kalman_filter(spec, revealed, n_states))


# -- the sampling plugin -------------------------------------------------------


class LgmModel(ModelPlugin):
    """Sample-space plugin: flat trajectories, Gibbs moves, Gaussian reweights.

    Born at target one with a single state and nothing revealed. ``advance``
    either records a new observation batch or births the next state; the
    Gibbs full-conditional factors are rebuilt lazily after each change.
    """

    def __init__(self, spec: LgmSpec):
        self.spec = spec
        self._n_states = 1
        self._rows: list[np.ndarray] = [np.empty(0, dtype=np.int64)]
        self._vals: list[np.ndarray] = [np.empty(0)]
        self._step = TargetStep(1, 0, 1)
        self._factors = None
        self._sigma_inv = np.linalg.inv(spec.sigma)
        self._sigma0_inv = np.linalg.inv(spec.sigma0)
        self._cross = self._sigma_inv @ spec.a
        self._quad = spec.a.T @ self._cross
        self._lq = np.linalg.cholesky(spec.sigma)

    @property
    def sample_dimension(self) -> int:
        return self.spec.dim * self._n_states

    @property
    def estimand_dimension(self) -> int:
        return self.sample_dimension

    @property
    def n_states(self) -> int:
        return self._n_states

    def estimand_labels(self) -> list[str]:
        d = self.spec.dim
        return [f"x{t}_{i}" for t in range(1, self._n_states + 1) for i in range(d)]

    def current_step(self) -> TargetStep:
        return self._step

    def revealed(self):
        return [(r.copy(), v.copy()) for r, v in zip(self._rows, self._vals)]

    def advance(self, step: TargetStep, payload) -> None:
        if step.index != self._step.index + 1:
            raise ContractViolationError(
                f"model at target {self._step.index} cannot jump to {step.index}"
            )
        if step.requires_transition:
            if payload is not None:
                raise ContractViolationError("transition targets carry no data")
            if step.state_index != self._n_states + 1:
                raise ContractViolationError("transition must birth the next state")
            self._n_states += 1
            self._rows.append(np.empty(0, dtype=np.int64))
            self._vals.append(np.empty(0))
        else:
            batch = payload
            if not isinstance(batch, ObservationBatch):
                raise ContractViolationError("data targets need an ObservationBatch")
            if batch.state_index != step.state_index or batch.state_index > self._n_states:
                raise ContractViolationError("batch state does not match the target")
            if np.any(batch.rows < 0) or np.any(batch.rows >= self.spec.n_rows):
                raise ContractViolationError("row index out of range")
            i = batch.state_index - 1
            if np.intersect1d(self._rows[i], batch.rows).size:
                raise ContractViolationError("row revealed twice")
            self._rows[i] = np.concatenate([self._rows[i], batch.rows])
            self._vals[i] = np.concatenate([self._vals[i], batch.values])
        self._step = step
        self._factors = None

    def initial_value(self, rng: np.random.Generator) -> np.ndarray:
        traj = np.empty((self._n_states, self.spec.dim))
        traj[0] = self.spec.mu0 + np.linalg.cholesky(self.spec.sigma0) @ rng.standard_normal(
            self.spec.dim
        )
        for s in range(1, self._n_states):
            traj[s] = self.spec.a @ traj[s - 1] + self._lq @ rng.standard_normal(self.spec.dim)
        return traj.ravel()

    def _build_factors(self):
        spec, t, d = self.spec, self._n_states, self.spec.dim
        chol = np.zeros((t, d, d))
        mprev = np.zeros((t, d, d))
        mnext = np.zeros((t, d, d))
        cvecs = np.zeros((t, d))
        for s in range(t):
            prec = self._sigma0_inv.copy() if s == 0 else self._sigma_inv.copy()
            if s == 0:
                cvecs[0] = self._sigma0_inv @ spec.mu0
            else:
                mprev[s] = self._cross
            if s < t - 1:
                prec += self._quad
                mnext[s] = self._cross.T
            rows = self._rows[s]
            if rows.size:
                bsub = spec.b[rows]
                weighted = bsub / spec.xi[rows, None]
                prec += bsub.T @ weighted
                cvecs[s] += weighted.T @ self._vals[s]
            chol[s] = np.linalg.cholesky(prec)
        return chol, mprev, mnext, cvecs

    def mcmc_steps(self, value, n_steps: int, rng: np.random.Generator) -> np.ndarray:
        if self._factors is None:
            self._factors = self._build_factors()
        chol, mprev, mnext, cvecs = self._factors
        traj = np.array(value, dtype=float).reshape(self._n_states, self.spec.dim)
        u_pick = rng.random(n_steps)
        z = rng.standard_normal((n_steps, self.spec.dim))
        _kernels.lgm_gibbs_chain(traj, chol, mprev, mnext, cvecs, u_pick, z)
        return traj.ravel()

    def log_incremental_weight(self, value, payload) -> float:
        return float(self.log_incremental_weight_many(np.asarray(value)[None, :], payload)[0])

    def log_incremental_weight_many(self, values, payload) -> np.ndarray:
        batch = payload
        spec = self.spec
        d = spec.dim
        lo = (batch.state_index - 1) * d
        state = np.asarray(values, dtype=float)[:, lo : lo + d]
        xi = spec.xi[batch.rows]
        resid = batch.values[None, :] - state @ spec.b[batch.rows].T
        consts = float(np.sum(np.log(xi)) + len(xi) * LOG_2PI)
        return -0.5 * (np.sum(resid * resid / xi[None, :], axis=1) + consts)

    def transition(self, value, rng: np.random.Generator) -> np.ndarray:
        last = np.asarray(value, dtype=float)[-self.spec.dim :]
        new = self.spec.a @ last + self._lq @ rng.standard_normal(self.spec.dim)
        return np.concatenate([np.asarray(value, dtype=float), new])

    def transition_many(self, values, rng: np.random.Generator) -> np.ndarray:
        vals = np.asarray(values, dtype=float)
        last = vals[:, -self.spec.dim :]
        z = rng.standard_normal((len(vals), self.spec.dim))
        new = last @ self.spec.a.T + z @ self._lq.T
        return np.hstack([vals, new])

    def estimand(self, value, key) -> np.ndarray:
        return np.array(value, dtype=float)

    def estimand_many(self, values, keys) -> np.ndarray:
        return np.array(values, dtype=float)

    def pilot_statistic(self, value) -> float:
        return float(np.asarray(value)[-self.spec.dim])

    # -- checkpointing ------------------------------------------------------

    def state_dict(self) -> dict:
        return {
            "n_states": self._n_states,
            "rows": [r.tolist() for r in self._rows],
            "vals": [v.tolist() for v in self._vals],
            "step": (self._step.index, self._step.batch_within_state, self._step.state_index),
        }

    def load_state_dict(self, state: dict) -> None:
        self._n_states = int(state["n_states"])
        self._rows = [np.asarray(r, dtype=np.int64) for r in state["rows"]]
        self._vals = [np.asarray(v, dtype=float) for v in state["vals"]]
        self._step = TargetStep(*state["step"])
        self._factors = None
