"""Deterministic scheduler tying the sampler, updater and controller together.

The canonical mode interleaves the four logical processes on one thread:
control evaluations happen on every store flush, data batches are revealed
only while the sampler is paused, and a deletion pass follows every control
step. The full event trace is then a pure function of (model, events, config,
seed). A threaded mode runs the processes as workers for realism; it keeps
every invariant but is excluded from bit-reproducibility.
"""

from __future__ import annotations

import csv
import json
import threading
import time
from dataclasses import dataclass

import numpy as np

from .accuracy import SENTINEL, control_accuracy
from .analysis import SampleLifetime, coverage_report, kaplan_meier, write_survival_csv
from .config import RunConfig
from .controller import ControlState, control_step, quality
from .engine import RollingEngine
from .errors import ConfigError, DegenerateWeightsError, PhaseBudgetError, RestoreError
from .models import football as fb
from .models.lgm import LgmModel, desk_spec, lgm_simulate, reveal_schedule
from .store import SampleDatabase
from .targets import TargetStep, effective_sample_size, weighted_estimate
from .updater import apply_target_change


@dataclass(frozen=True)
class EstimateReport:
    """One control-step observation of the running system."""

    target_index: int
    estimate: np.ndarray
    accuracy: float
    quality: float
    n: int
    n_max: int
    sampler_on: bool
    mcmc_steps: int
    actions: tuple[str, ...]


# -- event construction -------------------------------------------------------


def ingest_results(path, mode: str):
    """Chronological match batches from a results CSV, grouped by window."""
    return fb.group_batches(fb.read_results_csv(path), mode)


def football_events(matches, intros_by_season, mode: str):
    """Reveal sequence for a league: season intros interleaved with batches."""
    events = []
    n = 1
    state = 1
    batch_in_state = 0
    for batch in fb.group_batches(matches, mode):
        season = batch[0].season
        while season > state:
            state += 1
            if state not in intros_by_season:
                raise ConfigError(f"no team list for season {state}")
            n += 1
            events.append((TargetStep(n, 0, state), intros_by_season[state]))
            batch_in_state = 0
        if season != state:
            raise ConfigError(f"season {season} arrives out of order")
        n += 1
        batch_in_state += 1
        events.append((TargetStep(n, batch_in_state, state), batch))
    return events


def build_football_run(matches, config: RunConfig):
    """Model plus events from an explicit result list (CSV path)."""
    seasons = sorted({m.season for m in matches})
    if not seasons:
        raise ConfigError("result list is empty: the model needs season-1 teams")
    if seasons[0] != 1 or seasons != list(range(1, len(seasons) + 1)):
        raise ConfigError("seasons must be contiguous starting at 1")
    teams = {
        s: tuple(sorted({m.home for m in matches if m.season == s}
                        | {m.away for m in matches if m.season == s}))
        for s in seasons
    }
    intros = {s: fb.SeasonIntro(s, teams[s]) for s in seasons}
    model = fb.FootballModel(teams[1], _football_config(config))
    return model, football_events(matches, intros, config.batch_mode)


def build_synthetic_football_run(config: RunConfig):
    league = fb.synthetic_league(
        n_teams=config.synth_teams, n_seasons=config.synth_seasons,
        n_relegated=config.synth_relegated, seed=config.synth_seed,
        round_days=config.synth_round_days,
    )
    intros = {intro.season: intro for intro in league.intros}
    model = fb.FootballModel(league.intros[0].teams, _football_config(config))
    events = football_events(league.matches, intros, config.batch_mode)
    return model, events, league


def build_lgm_run(config: RunConfig):
    """Desk-scale linear-Gaussian preset; data seeded separately from the run."""
    spec = desk_spec(n_states=config.lgm_states)
    data_rng = np.random.default_rng(np.random.SeedSequence([config.synth_seed, 0x1C4]))
    states, obs = lgm_simulate(spec, data_rng)
    model = LgmModel(spec)
    return model, reveal_schedule(spec, obs), states, obs


def _football_config(config: RunConfig) -> fb.FootballConfig:
    return fb.FootballConfig(
        sample_theta=config.sample_theta, prediction_salt=config.prediction_salt
    )


# -- the run ------------------------------------------------------------------


class SystemRun:
    """One rolling run over a fixed reveal sequence."""

    def __init__(self, model, events, config: RunConfig, seed: int):
        if config.init_batches > len(events):
            raise ConfigError("init_batches exceeds the number of reveal events")
        self.model = model
        self.events = list(events)
        self.config = config
        self.seed = int(seed)
        self.cursor = 0
        for _ in range(config.init_batches):
            step, payload = self.events[self.cursor]
            self.model.advance(step, payload)
            self.cursor += 1
        chain_ss, update_ss, init_ss = np.random.SeedSequence(self.seed).spawn(3)
        self.rng_chain = np.random.default_rng(chain_ss)
        self.rng_update = np.random.default_rng(update_ss)
        self.db = SampleDatabase(config.control.n_max_init, dimension=model.sample_dimension)
        self.db.set_target_index(model.current_step().index)
        self.engine = RollingEngine(
            model, config.engine, model.current_step(), np.random.default_rng(init_ss)
        )
        self.control = ControlState(sampler_on=True, n_max=config.control.n_max_init)
        self.reports: list[EstimateReport] = []
        self.lifetimes: list[SampleLifetime] = []
        self.predictions: list[dict] = []
        self.pct_new: list[float] = []
        self.data_batches = 0
        self.resumes = 0
        self._measure_pending = False
        self._births: dict[int, int] = {}
        self._gcache: tuple[int, np.ndarray, np.ndarray] | None = None
        self._lock = threading.RLock()

    # -- scheduler pieces ---------------------------------------------------

    def _estimand_rows(self, snap) -> np.ndarray:
        """Estimand rows for a snapshot, reusing rows computed on earlier looks.

        Stored samples never change once written and the estimand is a fixed
        function of (value, seq) per target, so between two looks at the same
        target only the newly flushed rows need evaluating.  Deletion drops
        the oldest rows, which keeps the cache a suffix-aligned prefix.
        """
        seqs = snap.production_seqs
        if self._gcache is not None and self._gcache[0] == snap.target_index:
            _, old_seqs, old_rows = self._gcache
            start = int(np.searchsorted(old_seqs, seqs[0])) if len(old_seqs) else 0
            kept = old_seqs[start:]
            if len(kept) <= len(seqs) and np.array_equal(kept, seqs[: len(kept)]):
                fresh = self.model.estimand_many(
                    snap.values[len(kept) :], seqs[len(kept) :]
                ) if len(kept) < len(seqs) else np.empty((0, old_rows.shape[1]))
                rows = np.vstack([old_rows[start:], fresh]) if start or len(fresh) else old_rows
            else:
                rows = self.model.estimand_many(snap.values, seqs)
        else:
            rows = self.model.estimand_many(snap.values, seqs)
        self._gcache = (snap.target_index, seqs, rows)
        return rows

    def _observe(self):
        snap = self.db.snapshot()
        if snap.n:
            rows = self._estimand_rows(snap)
            acc = control_accuracy(snap.weights, rows, self.config.accuracy)
            qual = quality(effective_sample_size(snap.weights), self.control.n_max)
            estimate = weighted_estimate(snap.weights, rows)
        else:
            acc, qual = SENTINEL, 0.0
            estimate = np.full(self.model.estimand_dimension, np.nan)
        return snap, acc, qual, estimate

    def _control_and_report(self) -> bool:
        with self._lock:
            snap, acc, qual, estimate = self._observe()
            was_on = self.control.sampler_on
            self.control, actions = control_step(
                acc, qual, snap.n, self.control, self.config.control
            )
            if self.control.sampler_on and not was_on:
                self.resumes += 1
            if self.db.n_max != self.control.n_max:
                self.db.set_n_max(self.control.n_max)
            self._delete_overflow()
            self.reports.append(
                EstimateReport(
                    target_index=self.db.target_index, estimate=estimate,
                    accuracy=acc, quality=qual, n=snap.n,
                    n_max=self.control.n_max, sampler_on=self.control.sampler_on,
                    mcmc_steps=self.engine.raw_steps, actions=actions,
                )
            )
            return self.control.sampler_on

    def _delete_overflow(self):
        for seq in self.db.delete_overflow():
            born = self._births.pop(int(seq))
            self.lifetimes.append(SampleLifetime(self.data_batches - born, censored=False))

    def _register_births(self, seq_before: int):
        for seq in range(seq_before + 1, self.db.last_production_seq + 1):
            self._births[seq] = self.data_batches

    def _drive_until_paused(self):
        ticks_used = 0
        while True:
            if not self._control_and_report():
                return
            flushed = False
            while not flushed:
                if ticks_used >= self.config.max_ticks_per_phase:
                    raise PhaseBudgetError(
                        f"target {self.db.target_index}: accuracy not reached in "
                        f"{ticks_used} ticks"
                    )
                before = self.db.last_production_seq
                flushed = self.engine.tick(self.db, True, self.rng_chain)
                ticks_used += 1
                if flushed:
                    self._register_births(before)

    def _record_prediction(self):
        if not isinstance(self.model, fb.FootballModel) or not len(self.db):
            return
        teams = self.model.teams(self.model.n_seasons)
        if len(self.model.results(self.model.n_seasons)) >= len(teams) * (len(teams) - 1):
            return  # season complete: the table is known, nothing to predict
        snap, acc, _, estimate = self._observe()
        if not np.all(np.isfinite(estimate)):
            return
        self.predictions.append(
            {
                "target_index": self.db.target_index,
                "season": self.model.n_seasons,
                "teams": list(teams),
                "matrix": estimate.reshape(len(teams), len(teams)).tolist(),
                "accuracy": float(acc),
            }
        )

    def _rebuild_empty(self, step: TargetStep):
        # degenerate reweight: the incoming batch kills every stored sample
        for seq in self.db.snapshot().production_seqs:
            born = self._births.pop(int(seq))
            self.lifetimes.append(SampleLifetime(self.data_batches - born, censored=False))
        fresh = SampleDatabase(self.control.n_max, dimension=self.model.sample_dimension)
        fresh.set_target_index(step.index)
        self.db = fresh

    def _measure_new_fraction(self):
        # fraction of the store produced since the latest batch arrived
        if not self._measure_pending:
            return
        self._measure_pending = False
        snap = self.db.snapshot()
        if snap.n:
            self.pct_new.append(float(np.mean(snap.info_cutoffs >= snap.target_index)))

    def _reveal_next(self):
        with self._lock:
            step, payload = self.events[self.cursor]
            self._measure_new_fraction()
            self._record_prediction()
            self.model.advance(step, payload)
            try:
                apply_target_change(self.db, self.model, step, payload, self.rng_update)
            except DegenerateWeightsError:
                self._rebuild_empty(step)
            self.engine.on_target_change(step, self.rng_update)
            if not step.requires_transition:
                self.data_batches += 1
                self._measure_pending = True
            self.cursor += 1

    # -- top-level drivers -----------------------------------------------------

    def run_to_completion(self, db_path=None):
        if self.config.mode == "threads":
            self._run_threads()
        elif self.cursor >= len(self.events):
            if not self.reports:
                self._control_and_report()
        else:
            reveals = 0
            while self.cursor < len(self.events):
                self._drive_until_paused()
                self._reveal_next()
                reveals += 1
                if (
                    db_path
                    and self.config.checkpoint_every
                    and reveals % self.config.checkpoint_every == 0
                ):
                    self.save_checkpoint(db_path)
            self._drive_until_paused()
        # threads mode can pause mid write batch; settle the remainder
        before = self.db.last_production_seq
        if self.engine.flush(self.db):
            self._register_births(before)
            self._delete_overflow()
        self._measure_new_fraction()
        if db_path:
            self.save_checkpoint(db_path)

    def _run_threads(self):
        """Four workers against the shared store; wall-clock scheduling."""
        stop = threading.Event()
        poll = self.config.poll_interval
        errors: list[BaseException] = []

        def guard(fn):
            def inner():
                try:
                    fn()
                except BaseException as exc:  # propagate to the caller
                    errors.append(exc)
                    stop.set()
            return inner

        def sampler():
            while not stop.is_set():
                if self.control.sampler_on:
                    with self._lock:
                        if self.control.sampler_on:
                            before = self.db.last_production_seq
                            if self.engine.tick(self.db, True, self.rng_chain):
                                self._register_births(before)
                else:
                    time.sleep(poll)

        def controller():
            while not stop.is_set():
                self._control_and_report()
                time.sleep(poll)

        def updater():
            while not stop.is_set():
                with self._lock:
                    if self.cursor >= len(self.events):
                        if not self.control.sampler_on:
                            stop.set()
                            return
                    elif not self.control.sampler_on:
                        before = self.db.last_production_seq
                        self.engine.flush(self.db)
                        self._register_births(before)
                        self._reveal_next()
                time.sleep(poll)

        def deleter():
            while not stop.is_set():
                with self._lock:
                    self._delete_overflow()
                time.sleep(poll)

        workers = [
            threading.Thread(target=guard(fn), name=name)
            for name, fn in (
                ("sampler", sampler), ("controller", controller),
                ("updater", updater), ("deleter", deleter),
            )
        ]
        for w in workers:
            w.start()
        for w in workers:
            w.join()
        if errors:
            raise errors[0]

    # -- checkpointing -----------------------------------------------------------

    def save_checkpoint(self, db_path) -> None:
        db_path = str(db_path)
        self.db.save(db_path)
        meta = {
            "seed": self.seed,
            "cursor": self.cursor,
            "model": self.model.state_dict(),
            "engine": self.engine.state_dict(),
            "control": {"sampler_on": self.control.sampler_on, "n_max": self.control.n_max},
            "rng_chain": self.rng_chain.bit_generator.state,
            "rng_update": self.rng_update.bit_generator.state,
            "data_batches": self.data_batches,
            "resumes": self.resumes,
            "pct_new": self.pct_new,
            "measure_pending": self._measure_pending,
            "births": {str(k): v for k, v in self._births.items()},
            "lifetimes": [[lf.batches_survived, lf.censored] for lf in self.lifetimes],
            "predictions": self.predictions,
            "reports": [
                {
                    "target_index": r.target_index,
                    "estimate": np.asarray(r.estimate).tolist(),
                    "accuracy": r.accuracy, "quality": r.quality,
                    "n": r.n, "n_max": r.n_max, "sampler_on": r.sampler_on,
                    "mcmc_steps": r.mcmc_steps, "actions": list(r.actions),
                }
                for r in self.reports
            ],
        }
        with open(db_path + ".meta.json", "w") as fh:
            json.dump(meta, fh)

    @classmethod
    def load_checkpoint(cls, db_path, model, events, config: RunConfig) -> "SystemRun":
        """Rebuild a run from a saved store plus sidecar.

        ``model`` and ``events`` are reconstructed by the caller exactly as
        for a fresh run; the checkpoint overwrites the model state.
        """
        db_path = str(db_path)
        try:
            with open(db_path + ".meta.json") as fh:
                meta = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise RestoreError(f"cannot read checkpoint sidecar: {exc}") from exc
        run = cls.__new__(cls)
        run.model = model
        run.model.load_state_dict(meta["model"])
        run.events = list(events)
        run.config = config
        run.seed = int(meta["seed"])
        run.cursor = int(meta["cursor"])
        run.db = SampleDatabase.load(db_path, expect_dimension=model.sample_dimension)
        run.rng_chain = np.random.default_rng(0)
        run.rng_chain.bit_generator.state = meta["rng_chain"]
        run.rng_update = np.random.default_rng(0)
        run.rng_update.bit_generator.state = meta["rng_update"]
        run.engine = RollingEngine(
            model, config.engine, model.current_step(), np.random.default_rng(0)
        )
        run.engine.load_state_dict(meta["engine"])
        run.control = ControlState(
            sampler_on=bool(meta["control"]["sampler_on"]),
            n_max=int(meta["control"]["n_max"]),
        )
        run.reports = [
            EstimateReport(
                target_index=int(r["target_index"]),
                estimate=np.asarray(r["estimate"], dtype=float),
                accuracy=float(r["accuracy"]), quality=float(r["quality"]),
                n=int(r["n"]), n_max=int(r["n_max"]), sampler_on=bool(r["sampler_on"]),
                mcmc_steps=int(r["mcmc_steps"]), actions=tuple(r["actions"]),
            )
            for r in meta["reports"]
        ]
        run.lifetimes = [
            SampleLifetime(int(u), bool(c)) for u, c in meta["lifetimes"]
        ]
        run.predictions = list(meta["predictions"])
        run.pct_new = [float(v) for v in meta["pct_new"]]
        run.data_batches = int(meta["data_batches"])
        run.resumes = int(meta["resumes"])
        run._measure_pending = bool(meta["measure_pending"])
        run._births = {int(k): int(v) for k, v in meta["births"].items()}
        run._gcache = None
        run._lock = threading.RLock()
        return run

    # -- outputs -------------------------------------------------------------------

    def all_lifetimes(self) -> list[SampleLifetime]:
        """Recorded deletions plus right-censored survivors."""
        out = list(self.lifetimes)
        for seq in self.db.snapshot().production_seqs:
            born = self._births[int(seq)]
            out.append(SampleLifetime(self.data_batches - born, censored=True))
        return out

    def realized_ranks(self) -> dict[int, dict[str, int]]:
        """Final table of every revealed season (football only)."""
        if not isinstance(self.model, fb.FootballModel):
            return {}
        out = {}
        for season in range(1, self.model.n_seasons + 1):
            results = self.model.results(season)
            if not results:
                continue
            teams = self.model.teams(season)
            local = {tm: i for i, tm in enumerate(teams)}
            pts = np.zeros(len(teams), dtype=np.int64)
            gd = np.zeros(len(teams), dtype=np.int64)
            gf = np.zeros(len(teams), dtype=np.int64)
            for m in results:
                h, a = local[m.home], local[m.away]
                if m.home_goals > m.away_goals:
                    pts[h] += fb.WIN_POINTS
                elif m.home_goals < m.away_goals:
                    pts[a] += fb.WIN_POINTS
                else:
                    pts[h] += fb.DRAW_POINTS
                    pts[a] += fb.DRAW_POINTS
                gd[h] += m.home_goals - m.away_goals
                gd[a] += m.away_goals - m.home_goals
                gf[h] += m.home_goals
                gf[a] += m.away_goals
            ranks = fb.rank_table(pts, gd, gf)
            out[season] = {tm: int(ranks[local[tm]]) for tm in teams}
        return out

    def theta_summary(self):
        """Final weighted estimate and accuracy of each league parameter."""
        if not isinstance(self.model, fb.FootballModel):
            return []
        snap = self.db.snapshot()
        if snap.n == 0:
            return []
        cols = snap.values[:, -6:]
        rows = []
        for j, label in enumerate(fb.THETA_LABELS):
            est = float(weighted_estimate(snap.weights, cols[:, j : j + 1])[0])
            acc = control_accuracy(snap.weights, cols[:, j : j + 1], self.config.accuracy)
            rows.append((label, est, acc))
        return rows

    def write_outputs(self, out_dir) -> None:
        out_dir = str(out_dir)
        _write_reports_csv(f"{out_dir}/reports.csv", self.reports)
        self._write_summary(f"{out_dir}/summary.csv")
        lifetimes = self.all_lifetimes()
        _write_lifetimes_csv(f"{out_dir}/lifetimes.csv", lifetimes)
        if lifetimes:
            write_survival_csv(f"{out_dir}/survival.csv", kaplan_meier(lifetimes))
        else:
            _write_header_only(f"{out_dir}/survival.csv", ["u", "survival", "at_risk", "events"])
        if isinstance(self.model, fb.FootballModel):
            self._write_football_outputs(out_dir)

    def _write_summary(self, path):
        snap = self.db.snapshot()
        final_acc = self.reports[-1].accuracy if self.reports else SENTINEL
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["batches", "resumes", "total_mcmc_steps", "avg_pct_new",
                 "reports", "final_n", "final_n_max", "final_accuracy"]
            )
            avg_new = 100.0 * float(np.mean(self.pct_new)) if self.pct_new else float("nan")
            writer.writerow(
                [self.data_batches, self.resumes, self.engine.raw_steps,
                 f"{avg_new:.6g}", len(self.reports), snap.n, self.control.n_max,
                 f"{final_acc:.10g}"]
            )

    def _write_football_outputs(self, out_dir):
        truths = self.realized_ranks()
        _write_predictions_csv(f"{out_dir}/predictions.csv", self.predictions, truths)
        rows, ranks = [], []
        for pred in self.predictions:
            season_truth = truths.get(pred["season"])
            if season_truth is None:
                continue
            for t, team in enumerate(pred["teams"]):
                rows.append(np.asarray(pred["matrix"][t]))
                ranks.append(season_truth[team])
        if rows:
            from .analysis import write_coverage_csv

            write_coverage_csv(f"{out_dir}/coverage.csv", coverage_report(rows, ranks))
        else:
            _write_header_only(
                f"{out_dir}/coverage.csv", ["level", "avg_mass", "realized_coverage"]
            )
        snap = self.db.snapshot()
        teams = self.model.teams(self.model.n_seasons)
        if snap.n:
            est = weighted_estimate(
                snap.weights, self.model.estimand_many(snap.values, snap.production_seqs)
            )
            matrix = 100.0 * est.reshape(len(teams), len(teams))
        else:
            matrix = np.full((len(teams), len(teams)), np.nan)
        with open(f"{out_dir}/rankdist.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["team"] + [f"r{r}" for r in range(1, len(teams) + 1)])
            for t, team in enumerate(teams):
                writer.writerow([team] + [f"{v:.6g}" for v in matrix[t]])
        with open(f"{out_dir}/theta_summary.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["parameter", "estimate", "accuracy"])
            for label, est, acc in self.theta_summary():
                writer.writerow([label, f"{est:.10g}", f"{acc:.10g}"])


# -- file helpers ----------------------------------------------------------------


def _write_header_only(path, header):
    with open(path, "w", newline="") as fh:
        csv.writer(fh).writerow(header)


def _write_reports_csv(path, reports):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["target", "accuracy", "quality", "n", "n_max", "rmcmc_on",
             "mcmc_steps", "actions", "estimate"]
        )
        for r in reports:
            est = ";".join(repr(float(v)) for v in np.atleast_1d(r.estimate))
            writer.writerow(
                [r.target_index, repr(float(r.accuracy)), repr(float(r.quality)), r.n,
                 r.n_max, int(r.sampler_on), r.mcmc_steps, "+".join(r.actions), est]
            )


def read_reports_csv(path) -> list[EstimateReport]:
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            est = np.array([float(v) for v in row["estimate"].split(";") if v])
            out.append(
                EstimateReport(
                    target_index=int(row["target"]), estimate=est,
                    accuracy=float(row["accuracy"]), quality=float(row["quality"]),
                    n=int(row["n"]), n_max=int(row["n_max"]),
                    sampler_on=bool(int(row["rmcmc_on"])),
                    mcmc_steps=int(row["mcmc_steps"]),
                    actions=tuple(a for a in row["actions"].split("+") if a),
                )
            )
    return out


def _write_lifetimes_csv(path, lifetimes):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["batches_survived", "censored"])
        for lf in lifetimes:
            writer.writerow([lf.batches_survived, int(lf.censored)])


def read_lifetimes_csv(path) -> list[SampleLifetime]:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(SampleLifetime(int(row["batches_survived"]), bool(int(row["censored"]))))
    return out


def _write_predictions_csv(path, predictions, truths):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["target", "season", "team", "realized_rank", "probabilities"])
        for pred in predictions:
            season_truth = truths.get(pred["season"], {})
            for t, team in enumerate(pred["teams"]):
                probs = ";".join(repr(float(v)) for v in pred["matrix"][t])
                writer.writerow(
                    [pred["target_index"], pred["season"], team,
                     season_truth.get(team, ""), probs]
                )


def read_predictions_csv(path):
    """Rows of (distribution, realized rank) for coverage recomputation."""
    rows, ranks = [], []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            if not row["realized_rank"]:
                continue
            rows.append(np.array([float(v) for v in row["probabilities"].split(";")]))
            ranks.append(int(row["realized_rank"]))
    return rows, ranks
