"""Per-season team-strength league model with Poisson goal scoring.

Each team carries one strength per season. A match between home side ``j``
and away side ``k`` produces independent Poisson goal counts with rates
``lambda_h * exp(x_j - x_k)`` and ``lambda_a * exp(x_k - x_j)``. Between
seasons retained strengths evolve around their centered previous values and
promoted sides enter fresh; the six global parameters
``(lambda_h, lambda_a, eta, sigma_s, mu_p, sigma_p)`` are sampled alongside
the strengths by a block Metropolis-Hastings kernel.

The estimand is the end-of-season rank table: for every stored sample the
remaining fixtures are simulated once (reproducibly, keyed by the sample's
production sequence) and the resulting one-hot rank matrix is averaged under
the sample weights.
"""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .. import _kernels
from ..errors import ContractViolationError
from ..targets import ModelPlugin, TargetStep
from ._hashdraw import keyed_uniforms, poisson_from_uniforms

LOG_2PI = float(np.log(2.0 * np.pi))

WIN_POINTS = 3
DRAW_POINTS = 1


@dataclass(frozen=True)
class Theta:
    """Global scoring and season-evolution parameters."""

    lambda_home: float
    lambda_away: float
    eta: float
    sigma_s: float
    mu_p: float
    sigma_p: float

    def __post_init__(self):
        if min(self.lambda_home, self.lambda_away, self.sigma_s, self.sigma_p) <= 0.0:
            raise ValueError("rates and scale parameters must be positive")

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.lambda_home, self.lambda_away, self.eta,
             self.sigma_s, self.mu_p, self.sigma_p]
        )

    @classmethod
    def from_array(cls, arr) -> "Theta":
        return cls(*(float(v) for v in np.asarray(arr, dtype=float)))


THETA_LABELS = ("lambda_home", "lambda_away", "eta", "sigma_s", "mu_p", "sigma_p")


@dataclass(frozen=True)
class MatchResult:
    """One played match."""

    season: int
    date: dt.date
    home: str
    away: str
    home_goals: int
    away_goals: int

    def __post_init__(self):
        if self.season < 1:
            raise ValueError("season is 1-based")
        if self.home == self.away:
            raise ValueError("a team cannot play itself")
        if self.home_goals < 0 or self.away_goals < 0:
            raise ValueError("goals are nonnegative")


@dataclass(frozen=True)
class SeasonIntro:
    """Transition payload: the team set starting a new season."""

    season: int
    teams: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "teams", tuple(self.teams))
        if len(set(self.teams)) != len(self.teams) or len(self.teams) < 2:
            raise ValueError("need at least two distinct teams")


@dataclass(frozen=True)
class FootballConfig:
    """Priors, chain starting point and proposal variances.

    Proposal entries are variances (log-scale ones apply to log-normal
    proposals); the strength block moves one whole season at a time with
    probability ``strength_block_prob``, otherwise one of the four parameter
    blocks is drawn uniformly. ``sample_theta=False`` freezes the parameters
    at their starting values.
    """

    shape_home: float = 5.0
    scale_home: float = 5.0
    shape_away: float = 2.0
    scale_away: float = 1.0
    init_theta: Theta = field(
        default_factory=lambda: Theta(25.0, 2.0, 1.0, 0.1, 0.0, 0.3)
    )
    var_strength: float = 0.0002
    var_log_lambda_home: float = 0.01**2
    var_log_lambda_away: float = 0.01**2
    var_eta: float = 0.01
    var_log_sigma_s: float = 0.005
    var_mu_p: float = 0.0002
    var_log_sigma_p: float = 0.002
    strength_block_prob: float = 0.8
    sample_theta: bool = True
    prediction_salt: int = 0


def rank_table(points, goal_diff, goals_for) -> np.ndarray:
    """1-based final ranks: points, then goal difference, then goals scored,
    then team order as the deterministic last resort."""
    score = _rank_scores(
        np.asarray(points, dtype=np.int64)[None, :],
        np.asarray(goal_diff, dtype=np.int64)[None, :],
        np.asarray(goals_for, dtype=np.int64)[None, :],
    )
    order = np.argsort(-score[0], kind="stable")
    ranks = np.empty(len(order), dtype=np.int64)
    ranks[order] = np.arange(1, len(order) + 1)
    return ranks


def _rank_scores(points, goal_diff, goals_for) -> np.ndarray:
    # lexicographic composite; magnitudes are far below the field widths
    return points * (1 << 40) + (goal_diff + (1 << 19)) * (1 << 20) + goals_for


def rank_matrix(weights, rank_onehots, n_teams: int, check: bool = True) -> np.ndarray:
    """Weighted average of one-hot rank tables as a team-by-rank matrix."""
    w = np.asarray(weights, dtype=float)
    total = float(np.sum(w))
    if total <= 0.0:
        raise ContractViolationError("rank matrix needs positive total weight")
    mat = (w @ np.asarray(rank_onehots, dtype=float) / total).reshape(n_teams, n_teams)
    if check:
        err = max(
            np.abs(mat.sum(axis=0) - 1.0).max(), np.abs(mat.sum(axis=1) - 1.0).max()
        )
        if err > 1e-9:
            raise ContractViolationError(f"rank matrix not doubly stochastic ({err:.2e})")
    return mat


def simulate_match(x_home: float, x_away: float, theta: Theta, rng) -> tuple[int, int]:
    """Draw one match's goal counts."""
    gap = x_home - x_away
    return (
        int(rng.poisson(theta.lambda_home * math.exp(gap))),
        int(rng.poisson(theta.lambda_away * math.exp(-gap))),
    )


class FootballModel(ModelPlugin):
    """League model plugin over flat per-season strengths plus parameters.

    The sample value is ``[strengths of season 1, ..., season t, theta(6)]``.
    Born at target one holding the first season's team list and no results.
    """

    name = "football"

    def __init__(self, teams, config: FootballConfig | None = None):
        self.config = config or FootballConfig()
        first = tuple(teams)
        if len(set(first)) != len(first) or len(first) < 2:
            raise ValueError("need at least two distinct teams")
        self._teams: list[tuple[str, ...]] = [first]
        self._maps: list[dict[str, int]] = [{tm: i for i, tm in enumerate(first)}]
        self._matches: list[list[MatchResult]] = [[]]
        self._step = TargetStep(1, 0, 1)
        self._pack = None
        self._standings = None

    # -- layout ---------------------------------------------------------------

    @property
    def n_seasons(self) -> int:
        return len(self._teams)

    @property
    def offsets(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum([len(ts) for ts in self._teams])]).astype(
            np.int64
        )

    @property
    def strength_count(self) -> int:
        return sum(len(ts) for ts in self._teams)

    @property
    def sample_dimension(self) -> int:
        return self.strength_count + 6

    @property
    def estimand_dimension(self) -> int:
        return len(self._teams[-1]) ** 2

    def teams(self, season: int) -> tuple[str, ...]:
        return self._teams[season - 1]

    def strength_index(self, season: int, team: str) -> int:
        return int(self.offsets[season - 1]) + self._maps[season - 1][team]

    def theta_of(self, value) -> Theta:
        return Theta.from_array(np.asarray(value)[self.strength_count :])

    def estimand_labels(self) -> list[str]:
        teams = self._teams[-1]
        return [f"p_{tm}_r{r}" for tm in teams for r in range(1, len(teams) + 1)]

    def current_step(self) -> TargetStep:
        return self._step

    def results(self, season: int) -> tuple[MatchResult, ...]:
        return tuple(self._matches[season - 1])

    # -- reveals ----------------------------------------------------------------

    def advance(self, step: TargetStep, payload) -> None:
        if step.index != self._step.index + 1:
            raise ContractViolationError(
                f"model at target {self._step.index} cannot jump to {step.index}"
            )
        if step.requires_transition:
            if not isinstance(payload, SeasonIntro):
                raise ContractViolationError("transition targets need a SeasonIntro")
            if step.state_index != self.n_seasons + 1 or payload.season != step.state_index:
                raise ContractViolationError("transition must introduce the next season")
            if not set(payload.teams) & set(self._teams[-1]):
                raise ContractViolationError("a new season must retain at least one team")
            self._teams.append(payload.teams)
            self._maps.append({tm: i for i, tm in enumerate(payload.teams)})
            self._matches.append([])
        else:
            batch = tuple(payload)
            if not batch:
                raise ContractViolationError("data targets need at least one result")
            if step.state_index != self.n_seasons:
                raise ContractViolationError("data batches belong to the newest season")
            known = self._maps[-1]
            for m in batch:
                if m.season != step.state_index:
                    raise ContractViolationError(f"result from season {m.season} in target {step}")
                if m.home not in known or m.away not in known:
                    raise ContractViolationError(f"unknown team in {m.home} vs {m.away}")
            self._matches[-1].extend(batch)
        self._step = step
        self._pack = None
        self._standings = None

    # -- MCMC -------------------------------------------------------------------

    def _build_pack(self):
        cfg = self.config
        offsets = self.offsets
        t = self.n_seasons
        m_home, m_away, m_hg, m_ag = [], [], [], []
        m_start = np.zeros(t + 1, dtype=np.int64)
        for s in range(t):
            for m in self._matches[s]:
                m_home.append(self.strength_index(s + 1, m.home))
                m_away.append(self.strength_index(s + 1, m.away))
                m_hg.append(float(m.home_goals))
                m_ag.append(float(m.away_goals))
            m_start[s + 1] = len(m_home)
        r_prev, r_cur, p_cur = [], [], []
        r_start = np.zeros(t + 1, dtype=np.int64)
        p_start = np.zeros(t + 1, dtype=np.int64)
        for s in range(1, t):
            prev_map = self._maps[s - 1]
            for i, tm in enumerate(self._teams[s]):
                if tm in prev_map:
                    r_prev.append(int(self.offsets[s - 1]) + prev_map[tm])
                    r_cur.append(int(self.offsets[s]) + i)
                else:
                    p_cur.append(int(self.offsets[s]) + i)
            r_start[s + 1] = len(r_prev)
            p_start[s + 1] = len(p_cur)
        scales = np.array(
            [
                math.sqrt(cfg.var_strength),
                math.sqrt(cfg.var_log_lambda_home),
                math.sqrt(cfg.var_log_lambda_away),
                math.sqrt(cfg.var_eta),
                math.sqrt(cfg.var_log_sigma_s),
                math.sqrt(cfg.var_mu_p),
                math.sqrt(cfg.var_log_sigma_p),
                cfg.strength_block_prob if cfg.sample_theta else 1.0,
            ]
        )
        prior = np.array([cfg.shape_home, cfg.scale_home, cfg.shape_away, cfg.scale_away])
        return {
            "offsets": offsets,
            "m_start": m_start,
            "m_home": np.asarray(m_home, dtype=np.int64),
            "m_away": np.asarray(m_away, dtype=np.int64),
            "m_hg": np.asarray(m_hg, dtype=float),
            "m_ag": np.asarray(m_ag, dtype=float),
            "r_start": r_start,
            "r_prev": np.asarray(r_prev, dtype=np.int64),
            "r_cur": np.asarray(r_cur, dtype=np.int64),
            "p_start": p_start,
            "p_cur": np.asarray(p_cur, dtype=np.int64),
            "prior": prior,
            "scales": scales,
            "max_block": max(len(ts) for ts in self._teams),
        }

    def initial_value(self, rng) -> np.ndarray:
        return np.concatenate(
            [np.zeros(self.strength_count), self.config.init_theta.as_array()]
        )

    def mcmc_steps(self, value, n_steps: int, rng) -> np.ndarray:
        if self._pack is None:
            self._pack = self._build_pack()
        pack = self._pack
        nx = self.strength_count
        x = np.array(value[:nx], dtype=float)
        theta = np.array(value[nx:], dtype=float)
        u_block = rng.random(n_steps)
        u_pick = rng.random(n_steps)
        z_x = rng.standard_normal((n_steps, pack["max_block"]))
        z_th = rng.standard_normal((n_steps, 2))
        log_u = np.log(rng.random(n_steps))
        _kernels.football_mh_chain(
            x, theta, pack["offsets"], pack["m_start"], pack["m_home"], pack["m_away"],
            pack["m_hg"], pack["m_ag"], pack["r_start"], pack["r_prev"], pack["r_cur"],
            pack["p_start"], pack["p_cur"], pack["prior"], pack["scales"],
            u_block, u_pick, z_x, z_th, log_u,
        )
        return np.concatenate([x, theta])

    # -- weights and transitions ---------------------------------------------

    def log_incremental_weight(self, value, payload) -> float:
        return float(self.log_incremental_weight_many(np.asarray(value)[None, :], payload)[0])

    def log_incremental_weight_many(self, values, payload) -> np.ndarray:
        batch = tuple(payload)
        vals = np.asarray(values, dtype=float)
        nx = self.strength_count
        hidx = np.array([self.strength_index(m.season, m.home) for m in batch])
        aidx = np.array([self.strength_index(m.season, m.away) for m in batch])
        hg = np.array([m.home_goals for m in batch], dtype=float)
        ag = np.array([m.away_goals for m in batch], dtype=float)
        gap = vals[:, hidx] - vals[:, aidx]
        with np.errstate(over="ignore", divide="ignore"):
            log_lh = np.log(vals[:, nx, None])
            log_la = np.log(vals[:, nx + 1, None])
            ll = (
                hg * (log_lh + gap)
                - np.exp(log_lh + gap)
                + ag * (log_la - gap)
                - np.exp(log_la - gap)
            )
        consts = float(np.sum(gammaln(hg + 1.0) + gammaln(ag + 1.0)))
        out = np.sum(ll, axis=1) - consts
        return np.where(np.isnan(out), -np.inf, out)

    def transition(self, value, rng) -> np.ndarray:
        return self.transition_many(np.asarray(value)[None, :], rng)[0]

    def transition_many(self, values, rng) -> np.ndarray:
        """Draw new-season strengths; call after the season intro is registered."""
        if self.n_seasons < 2:
            raise ContractViolationError("no season transition is pending")
        vals = np.atleast_2d(np.asarray(values, dtype=float))
        cur, prev_map = self._teams[-1], self._maps[-2]
        nx_old = int(self.offsets[-2])
        if vals.shape[1] != nx_old + 6:
            raise ContractViolationError("values are not in the pre-transition space")
        retained_new, retained_prev, promoted_new = [], [], []
        for i, tm in enumerate(cur):
            if tm in prev_map:
                retained_new.append(i)
                retained_prev.append(int(self.offsets[-3]) + prev_map[tm])
            else:
                promoted_new.append(i)
        eta = vals[:, nx_old + 2, None]
        sig_s = vals[:, nx_old + 3, None]
        mu_p = vals[:, nx_old + 4, None]
        sig_p = vals[:, nx_old + 5, None]
        block = np.empty((len(vals), len(cur)))
        z = rng.standard_normal(block.shape)
        prev = vals[:, retained_prev]
        centered = prev - prev.mean(axis=1, keepdims=True)
        block[:, retained_new] = eta * centered + sig_s * z[:, retained_new]
        if promoted_new:
            block[:, promoted_new] = mu_p + sig_p * z[:, promoted_new]
        return np.hstack([vals[:, :nx_old], block, vals[:, nx_old:]])

    # -- rank prediction ---------------------------------------------------------

    def _season_standings(self):
        """Played points/GD/GF of the newest season plus remaining fixtures."""
        if self._standings is not None:
            return self._standings
        teams = self._teams[-1]
        n = len(teams)
        local = self._maps[-1]
        pts = np.zeros(n, dtype=np.int64)
        gd = np.zeros(n, dtype=np.int64)
        gf = np.zeros(n, dtype=np.int64)
        played = set()
        for m in self._matches[-1]:
            h, a = local[m.home], local[m.away]
            played.add((h, a))
            if m.home_goals > m.away_goals:
                pts[h] += WIN_POINTS
            elif m.home_goals < m.away_goals:
                pts[a] += WIN_POINTS
            else:
                pts[h] += DRAW_POINTS
                pts[a] += DRAW_POINTS
            gd[h] += m.home_goals - m.away_goals
            gd[a] += m.away_goals - m.home_goals
            gf[h] += m.home_goals
            gf[a] += m.away_goals
        remaining = [
            (h, a)
            for h in range(n)
            for a in range(n)
            if h != a and (h, a) not in played
        ]
        fix_h = np.array([h for h, _ in remaining], dtype=np.int64)
        fix_a = np.array([a for _, a in remaining], dtype=np.int64)
        fix_id = (self.n_seasons * n * n + fix_h * n + fix_a).astype(np.int64)
        self._standings = (pts, gd, gf, fix_h, fix_a, fix_id)
        return self._standings

    def estimand(self, value, key) -> np.ndarray:
        return self.estimand_many(np.asarray(value)[None, :], np.array([key]))[0]

    def estimand_many(self, values, keys) -> np.ndarray:
        vals = np.atleast_2d(np.asarray(values, dtype=float))
        keys = np.asarray(keys, dtype=np.int64)
        pts0, gd0, gf0, fix_h, fix_a, fix_id = self._season_standings()
        n = len(pts0)
        n_samples = len(vals)
        off = int(self.offsets[self.n_seasons - 1])
        nx = self.strength_count
        pts = np.tile(pts0, (n_samples, 1))
        gd = np.tile(gd0, (n_samples, 1))
        gf = np.tile(gf0, (n_samples, 1))
        if len(fix_h):
            # +-60 already exceeds the rate clamp in poisson_from_uniforms
            gap = np.clip(vals[:, off + fix_h] - vals[:, off + fix_a], -60.0, 60.0)
            rate_h = vals[:, nx, None] * np.exp(gap)
            rate_a = vals[:, nx + 1, None] * np.exp(-gap)
            salt = np.int64(self.config.prediction_salt + 1_000_003 * self._step.index)
            u_h = keyed_uniforms(salt, keys[:, None], fix_id[None, :] * 2)
            u_a = keyed_uniforms(salt, keys[:, None], fix_id[None, :] * 2 + 1)
            goals_h = poisson_from_uniforms(rate_h, u_h)
            goals_a = poisson_from_uniforms(rate_a, u_a)
            home_win = goals_h > goals_a
            draw = goals_h == goals_a
            home_pts = WIN_POINTS * home_win + DRAW_POINTS * draw
            away_pts = WIN_POINTS * (goals_a > goals_h) + DRAW_POINTS * draw
            for j in range(len(fix_h)):
                h, a = fix_h[j], fix_a[j]
                pts[:, h] += home_pts[:, j]
                pts[:, a] += away_pts[:, j]
                gd[:, h] += goals_h[:, j] - goals_a[:, j]
                gd[:, a] += goals_a[:, j] - goals_h[:, j]
                gf[:, h] += goals_h[:, j]
                gf[:, a] += goals_a[:, j]
        order = np.argsort(-_rank_scores(pts, gd, gf), axis=1, kind="stable")
        out = np.zeros((n_samples, n * n))
        rows = np.arange(n_samples)[:, None]
        out[rows, order * n + np.arange(n)[None, :]] = 1.0
        return out

    def pilot_statistic(self, value) -> float:
        v = np.asarray(value)
        return float(v[0] - v[1])

    # -- densities -----------------------------------------------------------------

    def log_posterior(self, value) -> float:
        """Full log posterior over everything revealed so far (for oracles)."""
        vals = np.asarray(value, dtype=float)
        nx = self.strength_count
        x, th = vals[:nx], vals[nx:]
        lh, la, eta, sig_s, mu_p, sig_p = th
        if min(lh, la, sig_s, sig_p) <= 0.0:
            return -np.inf
        total = 0.0
        all_matches = [m for per in self._matches for m in per]
        if all_matches:
            total += float(
                self.log_incremental_weight_many(vals[None, :], all_matches)[0]
            )
        for s in range(1, self.n_seasons):
            prev_map = self._maps[s - 1]
            retained_prev, retained_cur, promoted = [], [], []
            for i, tm in enumerate(self._teams[s]):
                if tm in prev_map:
                    retained_prev.append(int(self.offsets[s - 1]) + prev_map[tm])
                    retained_cur.append(int(self.offsets[s]) + i)
                else:
                    promoted.append(int(self.offsets[s]) + i)
            prev = x[retained_prev]
            resid = x[retained_cur] - eta * (prev - prev.mean())
            total += -0.5 * float(np.sum(resid**2)) / sig_s**2 - len(resid) * (
                math.log(sig_s) + 0.5 * LOG_2PI
            )
            if promoted:
                presid = x[promoted] - mu_p
                total += -0.5 * float(np.sum(presid**2)) / sig_p**2 - len(promoted) * (
                    math.log(sig_p) + 0.5 * LOG_2PI
                )
        cfg = self.config
        total += (cfg.shape_home - 1.0) * math.log(lh) - lh / cfg.scale_home
        total += (cfg.shape_away - 1.0) * math.log(la) - la / cfg.scale_away
        total += -math.log(sig_s) - math.log(sig_p)
        return total

    # -- checkpointing ----------------------------------------------------------

    def state_dict(self) -> dict:
        return {
            "teams": [list(ts) for ts in self._teams],
            "matches": [
                [
                    (m.season, m.date.isoformat(), m.home, m.away, m.home_goals, m.away_goals)
                    for m in per
                ]
                for per in self._matches
            ],
            "step": (self._step.index, self._step.batch_within_state, self._step.state_index),
        }

    def load_state_dict(self, state: dict) -> None:
        self._teams = [tuple(ts) for ts in state["teams"]]
        self._maps = [{tm: i for i, tm in enumerate(ts)} for ts in self._teams]
        self._matches = [
            [
                MatchResult(s, dt.date.fromisoformat(d), h, a, int(hg), int(ag))
                for (s, d, h, a, hg, ag) in per
            ]
            for per in state["matches"]
        ]
        self._step = TargetStep(*state["step"])
        self._pack = None
        self._standings = None


# -- synthetic data -------------------------------------------------------------


@dataclass(frozen=True)
class SyntheticLeague:
    """Generated fixture results plus the truth behind them."""

    matches: tuple[MatchResult, ...]
    intros: tuple[SeasonIntro, ...]
    strengths: dict
    theta: Theta


def round_robin_rounds(teams) -> list[list[tuple[str, str]]]:
    """Double round robin as rounds of simultaneous fixtures (circle method)."""
    ts = list(teams)
    n = len(ts)
    if n % 2:
        raise ValueError("need an even number of teams")
    first: list[list[tuple[str, str]]] = []
    idx = list(range(n))
    for r in range(n - 1):
        pairs = []
        ring = [idx[0]] + idx[1:][r:] + idx[1:][:r]
        for i in range(n // 2):
            a, b = ring[i], ring[n - 1 - i]
            pairs.append((ts[a], ts[b]) if (r + i) % 2 == 0 else (ts[b], ts[a]))
        first.append(pairs)
    second = [[(away, home) for home, away in rnd] for rnd in first]
    return first + second


def season_start(season: int) -> dt.date:
    return dt.date(2000 + season, 8, 15)


def synthetic_league(
    n_teams: int = 6,
    n_seasons: int = 2,
    n_relegated: int = 2,
    theta: Theta | None = None,
    seed: int = 0,
    round_days: int = 7,
) -> SyntheticLeague:
    """Generate a league history from the model itself.

    First-season strengths are drawn N(0, 0.3^2) (the model's flat prior
    cannot generate); later seasons follow the transition law, with the
    bottom ``n_relegated`` of each realized final table replaced by fresh
    promoted sides. Rounds are ``round_days`` apart (weekly by default).
    """
    if not 0 < n_relegated < n_teams:
        raise ValueError("n_relegated must be in (0, n_teams)")
    theta = theta or Theta(1.5, 1.1, 0.95, 0.15, -0.2, 0.25)
    rng = np.random.default_rng(seed)
    teams = [f"T{i+1:02d}" for i in range(n_teams)]
    strengths = {tm: float(0.3 * rng.standard_normal()) for tm in teams}
    all_matches: list[MatchResult] = []
    intros: list[SeasonIntro] = []
    truth: dict = {}
    promoted_serial = 0
    for season in range(1, n_seasons + 1):
        intros.append(SeasonIntro(season, tuple(teams)))
        for tm in teams:
            truth[(season, tm)] = strengths[tm]
        start = season_start(season)
        season_matches = []
        for rnd, pairs in enumerate(round_robin_rounds(teams)):
            date = start + dt.timedelta(days=round_days * rnd)
            for home, away in pairs:
                hg, ag = simulate_match(strengths[home], strengths[away], theta, rng)
                season_matches.append(MatchResult(season, date, home, away, hg, ag))
        all_matches.extend(season_matches)
        if season == n_seasons:
            break
        pts = np.zeros(n_teams, dtype=np.int64)
        gd = np.zeros(n_teams, dtype=np.int64)
        gf = np.zeros(n_teams, dtype=np.int64)
        local = {tm: i for i, tm in enumerate(teams)}
        for m in season_matches:
            h, a = local[m.home], local[m.away]
            if m.home_goals > m.away_goals:
                pts[h] += WIN_POINTS
            elif m.home_goals < m.away_goals:
                pts[a] += WIN_POINTS
            else:
                pts[h] += DRAW_POINTS
                pts[a] += DRAW_POINTS
            gd[h] += m.home_goals - m.away_goals
            gd[a] += m.away_goals - m.home_goals
            gf[h] += m.home_goals
            gf[a] += m.away_goals
        ranks = rank_table(pts, gd, gf)
        keep = [tm for tm in teams if ranks[local[tm]] <= n_teams - n_relegated]
        kept_strengths = np.array([strengths[tm] for tm in keep])
        centered = kept_strengths - kept_strengths.mean()
        new_strengths = {}
        new_teams = list(keep)
        for tm, c in zip(keep, centered):
            new_strengths[tm] = float(theta.eta * c + theta.sigma_s * rng.standard_normal())
        for _ in range(n_relegated):
            promoted_serial += 1
            tm = f"P{promoted_serial:02d}"
            new_teams.append(tm)
            new_strengths[tm] = float(theta.mu_p + theta.sigma_p * rng.standard_normal())
        teams = new_teams
        strengths = new_strengths
    return SyntheticLeague(tuple(all_matches), tuple(intros), truth, theta)


# -- CSV and batching ------------------------------------------------------------

CSV_HEADER = ["season", "date", "home", "away", "home_goals", "away_goals"]


def write_results_csv(path, matches) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for m in matches:
            writer.writerow(
                [m.season, m.date.isoformat(), m.home, m.away, m.home_goals, m.away_goals]
            )


def read_results_csv(path) -> list[MatchResult]:
    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CSV_HEADER:
            raise ValueError(f"{path}: expected header {','.join(CSV_HEADER)}")
        for ln, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                out.append(
                    MatchResult(
                        int(row[0]), dt.date.fromisoformat(row[1]), row[2], row[3],
                        int(row[4]), int(row[5]),
                    )
                )
            except (IndexError, ValueError) as exc:
                raise ValueError(f"{path}: line {ln}: {exc}") from exc
    return out


BATCH_MODES = ("single", "7d", "30d")


def group_batches(matches, mode: str) -> list[tuple[MatchResult, ...]]:
    """Chronological reveal batches: one per match, or 7/30-day windows.

    Windows never span seasons; each window starts at the first not yet
    grouped match date of its season.
    """
    if mode not in BATCH_MODES:
        raise ValueError(f"batch mode must be one of {BATCH_MODES}")
    ordered = sorted(matches, key=lambda m: (m.season, m.date))
    if mode == "single":
        return [(m,) for m in ordered]
    days = 7 if mode == "7d" else 30
    batches = []
    current: list[MatchResult] = []
    window_end = None
    for m in ordered:
        if current and (m.season != current[0].season or m.date >= window_end):
            batches.append(tuple(current))
            current = []
        if not current:
            window_end = m.date + dt.timedelta(days=days)
        current.append(m)
    if current:
        batches.append(tuple(current))
    return batches
