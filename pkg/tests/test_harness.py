"""Scheduler, configuration, checkpointing and the CLI front end."""

import os

import numpy as np
import pytest

from rollmc.accuracy import SENTINEL
from rollmc.cli import main as cli_main
from rollmc.config import (
    KEY_TABLE,
    RunConfig,
    default_config_text,
    load_config,
    parse_config_text,
)
from rollmc.errors import ConfigError, PhaseBudgetError, RestoreError
from rollmc.harness import (
    SystemRun,
    build_football_run,
    build_lgm_run,
    build_synthetic_football_run,
    football_events,
    ingest_results,
    read_lifetimes_csv,
    read_predictions_csv,
    read_reports_csv,
)
from rollmc.models import football as fb
from rollmc.models.lgm import ObservationBatch


def small_config(**overrides):
    base = RunConfig().overridden(
        synth_teams=4, synth_seasons=2, synth_relegated=1, synth_seed=3,
        n_min=300, n_max_init=600, write_batch_size=100, burn_in=50,
        batch_lengths=(5.0, 10.0), min_batches=10,
        beta1=0.05, beta2=0.06, max_ticks_per_phase=400_000,
    )
    return base.overridden(**overrides) if overrides else base


def fresh_run(config=None, seed=11):
    config = config or small_config()
    model, events, league = build_synthetic_football_run(config)
    return SystemRun(model, events, config, seed=seed), league


def same_reports(ra, rb):
    if len(ra) != len(rb):
        return False
    return all(
        a.target_index == b.target_index
        and np.array_equal(a.estimate, b.estimate, equal_nan=True)
        and a.accuracy == b.accuracy
        and a.quality == b.quality
        and a.n == b.n
        and a.n_max == b.n_max
        and a.sampler_on == b.sampler_on
        and a.mcmc_steps == b.mcmc_steps
        and a.actions == b.actions
        for a, b in zip(ra, rb)
    )


@pytest.fixture(scope="module")
def done_run():
    run, league = fresh_run()
    run.run_to_completion()
    return run, league


class TestConfigParsing:
    def test_empty_text_gives_defaults(self):
        values = parse_config_text("")
        assert values == {k: d for k, (_, d, _) in KEY_TABLE.items()}
        assert RunConfig.from_mapping(values) == RunConfig()

    def test_default_text_roundtrips(self):
        assert RunConfig.from_mapping(parse_config_text(default_config_text())) == RunConfig()

    def test_comments_and_blanks_ignored(self):
        values = parse_config_text("# c\n\n beta1 = 0.02 \n")
        assert values["beta1"] == 0.02

    def test_unknown_key_reports_line(self):
        with pytest.raises(ConfigError, match="line 2.*no_such"):
            parse_config_text("beta1 = 0.02\nno_such = 1\n")

    def test_bad_value_reports_line(self):
        with pytest.raises(ConfigError, match="line 1.*n_min"):
            parse_config_text("n_min = many\n")

    def test_missing_equals(self):
        with pytest.raises(ConfigError, match="line 1"):
            parse_config_text("beta1 0.02\n")

    def test_batch_lengths_list(self):
        assert parse_config_text("batch_lengths = 5, 25\n")["batch_lengths"] == (5.0, 25.0)

    def test_mode_and_batch_mode_validated(self):
        with pytest.raises(ConfigError):
            parse_config_text("mode = fibers\n")
        with pytest.raises(ConfigError):
            parse_config_text("batch_mode = 14d\n")

    def test_bool_forms(self):
        assert parse_config_text("sample_theta = off\n")["sample_theta"] is False
        assert parse_config_text("sample_theta = Yes\n")["sample_theta"] is True

    def test_overridden_rejects_unknown(self):
        with pytest.raises(ConfigError, match="unknown"):
            RunConfig().overridden(betamax=1)

    def test_overridden_reaches_subconfigs(self):
        cfg = RunConfig().overridden(beta1=0.003, burn_in=7, min_batches=4)
        assert cfg.control.beta1 == 0.003
        assert cfg.engine.burn_in == 7
        assert cfg.accuracy.min_batches == 4

    def test_load_config_file(self, tmp_path):
        p = tmp_path / "run.cfg"
        p.write_text("n_min = 123\nbatch_mode = 30d\n")
        cfg = load_config(p)
        assert cfg.control.n_min == 123
        assert cfg.batch_mode == "30d"


class TestEventBuilders:
    def test_intros_inserted_at_season_boundaries(self):
        cfg = small_config()
        _, events, league = build_synthetic_football_run(cfg)
        indices = [step.index for step, _ in events]
        assert indices == list(range(2, 2 + len(events)))
        transitions = [step for step, _ in events if step.requires_transition]
        assert len(transitions) == cfg.synth_seasons - 1
        assert all(step.batch_within_state == 0 for step in transitions)
        # batch counter restarts after each intro
        for (a, _), (b, _) in zip(events, events[1:]):
            if b.requires_transition:
                continue
            expected = 1 if a.requires_transition else a.batch_within_state + 1
            if a.state_index == b.state_index or a.requires_transition:
                assert b.batch_within_state == expected

    def test_missing_intro_is_error(self):
        cfg = small_config()
        _, _, league = build_synthetic_football_run(cfg)
        intros = {i.season: i for i in league.intros if i.season != 2}
        with pytest.raises(ConfigError, match="season 2"):
            football_events(league.matches, intros, "7d")

    def test_csv_run_matches_synthetic_events(self, tmp_path):
        cfg = small_config()
        model_a, events_a, league = build_synthetic_football_run(cfg)
        path = tmp_path / "league.csv"
        fb.write_results_csv(path, league.matches)
        model_b, events_b = build_football_run(fb.read_results_csv(path), cfg)
        assert model_b.teams(1) == model_a.teams(1)
        assert len(events_b) == len(events_a)
        for (sa, pa), (sb, pb) in zip(events_a, events_b):
            assert sa == sb
            if sa.requires_transition:
                assert tuple(sorted(pa.teams)) == pb.teams
            else:
                assert pa == pb

    def test_empty_result_list_rejected(self):
        with pytest.raises(ConfigError, match="empty"):
            build_football_run([], small_config())

    def test_gapped_seasons_rejected(self):
        m = fb.MatchResult(3, fb.season_start(3), "A", "B", 1, 0)
        with pytest.raises(ConfigError, match="contiguous"):
            build_football_run([m], small_config())

    def test_ingest_results_groups_by_window(self, tmp_path):
        _, _, league = build_synthetic_football_run(small_config())
        path = tmp_path / "league.csv"
        fb.write_results_csv(path, league.matches)
        batches = ingest_results(path, "single")
        assert len(batches) == len(league.matches)
        assert ingest_results(path, "30d") == fb.group_batches(league.matches, "30d")

    def test_ingest_results_empty_file(self, tmp_path):
        path = tmp_path / "none.csv"
        fb.write_results_csv(path, [])
        assert ingest_results(path, "7d") == []

    def test_lgm_schedule_alternates_births_and_batches(self):
        cfg = RunConfig().overridden(lgm_states=2, synth_seed=9)
        model, events, states, obs = build_lgm_run(cfg)
        assert model.n_states == 1
        assert states.shape[0] == 2
        per_state = len(events) // 2
        assert [s.requires_transition for s, _ in events].count(True) == 1
        assert all(
            isinstance(p, ObservationBatch) for s, p in events if not s.requires_transition
        )

    def test_lgm_data_fixed_by_synth_seed(self):
        cfg = RunConfig().overridden(lgm_states=2, synth_seed=9)
        _, _, s1, o1 = build_lgm_run(cfg)
        _, _, s2, o2 = build_lgm_run(cfg)
        assert np.array_equal(s1, s2) and np.array_equal(o1, o2)
        _, _, s3, _ = build_lgm_run(cfg.overridden(synth_seed=10))
        assert not np.array_equal(s1, s3)


class TestSystemRun:
    def test_deterministic_replay(self, done_run):
        ref, _ = done_run
        other, _ = fresh_run()
        other.run_to_completion()
        assert same_reports(ref.reports, other.reports)
        assert other.pct_new == ref.pct_new
        assert other.resumes == ref.resumes

    def test_seed_changes_trace(self, done_run):
        ref, _ = done_run
        other, _ = fresh_run(seed=12)
        other.run_to_completion()
        assert not same_reports(ref.reports, other.reports)

    def test_zero_events_single_report(self):
        cfg = small_config()
        model, _, _ = build_synthetic_football_run(cfg)
        run = SystemRun(model, [], cfg, seed=1)
        run.run_to_completion()
        assert len(run.reports) == 1
        assert run.reports[0].accuracy == SENTINEL
        assert run.reports[0].n == 0
        assert run.data_batches == 0

    def test_first_report_is_replenish(self, done_run):
        run, _ = done_run
        assert run.reports[0].accuracy == SENTINEL
        assert run.reports[0].actions == ("replenish",)
        assert run.reports[0].n_max == run.config.control.n_min

    def test_paused_rows_meet_accuracy_bound(self, done_run):
        run, _ = done_run
        beta2 = run.config.control.beta2
        off = [r for r in run.reports if not r.sampler_on]
        assert off
        assert all(r.accuracy <= beta2 or r.accuracy == SENTINEL for r in off)

    def test_mcmc_steps_nondecreasing(self, done_run):
        run, _ = done_run
        steps = [r.mcmc_steps for r in run.reports]
        assert all(a <= b for a, b in zip(steps, steps[1:]))

    def test_lifetime_bookkeeping_is_exhaustive(self, done_run):
        run, _ = done_run
        lifetimes = run.all_lifetimes()
        # every retained sample is either recorded dead or censored alive
        assert len(lifetimes) == run.engine.next_seq
        assert sum(lf.censored for lf in lifetimes) == len(run.db)
        assert all(lf.batches_survived >= 0 for lf in lifetimes)

    def test_store_respects_capacity(self, done_run):
        run, _ = done_run
        assert len(run.db) <= run.control.n_max

    def test_one_measurement_per_batch(self, done_run):
        run, _ = done_run
        assert len(run.pct_new) == run.data_batches
        assert all(0.0 <= v <= 1.0 for v in run.pct_new)

    def test_predictions_skip_completed_seasons(self, done_run):
        run, league = done_run
        n = len(league.intros[0].teams)
        per_season = n * (n - 1)
        # one prediction per data reveal except the first of season one
        assert all(len(p["teams"]) == n for p in run.predictions)
        assert all(
            abs(sum(map(sum, p["matrix"])) - n) < 1e-6 for p in run.predictions
        )

    def test_init_batches_prefeeds_model(self):
        cfg = small_config(init_batches=3)
        run, _ = fresh_run(cfg)
        assert run.cursor == 3
        assert run.db.target_index == run.model.current_step().index
        assert run.model.current_step().index == 4

    def test_init_batches_bound(self):
        cfg = small_config(init_batches=99)
        model, events, _ = build_synthetic_football_run(cfg)
        with pytest.raises(ConfigError, match="init_batches"):
            SystemRun(model, events, cfg, seed=0)

    def test_phase_budget_raises(self):
        cfg = small_config(max_ticks_per_phase=10)
        run, _ = fresh_run(cfg)
        with pytest.raises(PhaseBudgetError):
            run.run_to_completion()

    def test_frozen_theta_stays_fixed(self):
        cfg = small_config(sample_theta=False)
        model, events, _ = build_synthetic_football_run(cfg)
        run = SystemRun(model, events[:3], cfg, seed=5)
        run.run_to_completion()
        snap = run.db.snapshot()
        theta = snap.values[:, -6:]
        assert np.all(theta == theta[0])


class TestOutputs:
    def test_file_set_and_roundtrips(self, done_run, tmp_path):
        run, _ = done_run
        run.write_outputs(tmp_path)
        names = {
            "reports.csv", "summary.csv", "survival.csv", "coverage.csv",
            "rankdist.csv", "lifetimes.csv", "predictions.csv", "theta_summary.csv",
        }
        assert names <= {p.name for p in tmp_path.iterdir()}
        rows = read_reports_csv(tmp_path / "reports.csv")
        assert same_reports(rows, run.reports)
        lifetimes = read_lifetimes_csv(tmp_path / "lifetimes.csv")
        assert len(lifetimes) == len(run.all_lifetimes())
        dists, ranks = read_predictions_csv(tmp_path / "predictions.csv")
        assert len(dists) == len(ranks)
        assert len(dists) == sum(len(p["teams"]) for p in run.predictions)

    def test_summary_row(self, done_run, tmp_path):
        run, _ = done_run
        run.write_outputs(tmp_path)
        header, row = (tmp_path / "summary.csv").read_text().strip().splitlines()
        vals = dict(zip(header.split(","), row.split(",")))
        assert int(vals["batches"]) == run.data_batches
        assert int(vals["resumes"]) == run.resumes
        assert int(vals["total_mcmc_steps"]) == run.engine.raw_steps
        assert abs(float(vals["avg_pct_new"]) - 100 * np.mean(run.pct_new)) < 1e-4

    def test_rankdist_rows_sum_to_hundred(self, done_run, tmp_path):
        run, _ = done_run
        run.write_outputs(tmp_path)
        lines = (tmp_path / "rankdist.csv").read_text().strip().splitlines()[1:]
        for line in lines:
            probs = [float(v) for v in line.split(",")[1:]]
            assert abs(sum(probs) - 100.0) < 1e-6


class TestCheckpoint:
    def test_interrupted_equals_uninterrupted(self, done_run, tmp_path):
        ref, _ = done_run
        cfg = small_config()
        db = str(tmp_path / "chk.db")
        partial, _ = fresh_run()
        for _ in range(5):
            partial._drive_until_paused()
            partial._reveal_next()
        partial.save_checkpoint(db)
        model, events, _ = build_synthetic_football_run(cfg)
        resumed = SystemRun.load_checkpoint(db, model, events, cfg)
        resumed.run_to_completion()
        assert same_reports(resumed.reports, ref.reports)
        assert resumed.pct_new == ref.pct_new
        assert resumed.resumes == ref.resumes
        a, b = resumed.db.snapshot(), ref.db.snapshot()
        assert np.array_equal(a.values, b.values)
        assert np.array_equal(a.weights, b.weights)
        assert np.array_equal(a.production_seqs, b.production_seqs)

    def test_missing_sidecar_is_restore_error(self, done_run, tmp_path):
        run, _ = done_run
        cfg = small_config()
        db = str(tmp_path / "chk.db")
        run.db.save(db)
        model, events, _ = build_synthetic_football_run(cfg)
        with pytest.raises(RestoreError, match="sidecar"):
            SystemRun.load_checkpoint(db, model, events, cfg)

    def test_corrupt_sidecar_is_restore_error(self, done_run, tmp_path):
        run, _ = done_run
        db = str(tmp_path / "chk.db")
        run.save_checkpoint(db)
        with open(db + ".meta.json", "w") as fh:
            fh.write("{not json")
        cfg = small_config()
        model, events, _ = build_synthetic_football_run(cfg)
        with pytest.raises(RestoreError):
            SystemRun.load_checkpoint(db, model, events, cfg)


class TestThreadsMode:
    def test_threaded_run_keeps_invariants(self):
        cfg = small_config(mode="threads", poll_interval=0.0005)
        run, _ = fresh_run(cfg)
        run.run_to_completion()
        assert run.cursor == len(run.events)
        beta2 = cfg.control.beta2
        off = [r for r in run.reports if not r.sampler_on]
        assert all(r.accuracy <= beta2 or r.accuracy == SENTINEL for r in off)
        assert len(run.all_lifetimes()) == run.engine.next_seq
        assert len(run.db) <= run.control.n_max


class TestCli:
    def run_args(self, tmp_path, *extra):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "synth_teams = 4\nsynth_seasons = 2\nsynth_relegated = 1\n"
            "synth_seed = 3\nn_min = 300\nn_max_init = 600\n"
            "write_batch_size = 100\nburn_in = 50\nbatch_lengths = 5,10\n"
            "min_batches = 10\nbeta1 = 0.05\nbeta2 = 0.06\n"
        )
        return [
            "run", "--model", "football-synth", "--config", str(cfg),
            "--seed", "11", "--out", str(tmp_path / "out"), *extra,
        ]

    def test_run_then_analyze(self, tmp_path, capsys):
        assert cli_main(self.run_args(tmp_path)) == 0
        out = tmp_path / "out"
        assert (out / "reports.csv").exists()
        assert (out / "checkpoint.db").exists()
        assert cli_main(["analyze", "--survival", "--coverage", "--in", str(out)]) == 0
        text = capsys.readouterr().out
        assert "survival" in text and "realized_coverage" in text

    def test_run_is_deterministic_across_invocations(self, tmp_path):
        args = self.run_args(tmp_path)
        assert cli_main(args) == 0
        first = (tmp_path / "out" / "reports.csv").read_bytes()
        assert cli_main(args) == 0
        assert (tmp_path / "out" / "reports.csv").read_bytes() == first

    def test_missing_data_fails_cleanly(self, tmp_path, capsys):
        code = cli_main(
            ["run", "--model", "football", "--out", str(tmp_path / "o"), "--seed", "1"]
        )
        assert code == 2
        assert "error:" in capsys.readouterr().err

    def test_analyze_needs_a_task(self, tmp_path, capsys):
        assert cli_main(["analyze", "--in", str(tmp_path)]) == 2

    def test_default_config_parses_back(self, capsys):
        assert cli_main(["default-config"]) == 0
        text = capsys.readouterr().out
        assert RunConfig.from_mapping(parse_config_text(text)) == RunConfig()

    def test_tune_subsample_lgm(self, capsys):
        code = cli_main(
            ["tune-subsample", "--model", "lgm", "--pilot-steps", "3000", "--seed", "4"]
        )
        assert code == 0
        assert "stride" in capsys.readouterr().out
