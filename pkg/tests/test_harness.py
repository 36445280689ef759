import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from coin_lab import cli
from coin_lab.bar import BarParams, world_reward
from coin_lab.core import make_partition
from coin_lab.harness import (
    ConfigError,
    ExperimentConfig,
    RunSeries,
    bar_optimum,
    first_week_reaching,
    format_csv,
    init_trial,
    moving_average,
    parse_config,
    parse_config_text,
    run_batch,
    run_trial,
    run_trial_detailed,
    step,
    write_csv,
)
from coin_lab.macrolearn import apply_macrolearning, keeps_triples_together

SMALL_LF = ExperimentConfig(problem="leader_follower", num_leaders=3, weeks=60, runs=2)


def brute_force_optimum(params):
    best = -math.inf
    for split in itertools.combinations_with_replacement(range(7), params.num_agents):
        x = np.bincount(split, minlength=7)
        best = max(best, world_reward(x, params))
    return best


@pytest.mark.parametrize("preset", ["uniform", "single_night"])
@pytest.mark.parametrize("n", [1, 5, 9, 12])
def test_dp_optimum_matches_brute_force(preset, n):
    params = BarParams.preset(preset, num_agents=n)
    assert bar_optimum(params) == pytest.approx(brute_force_optimum(params), abs=1e-12)


def test_dp_optimum_random_alpha_matches_brute_force():
    rng = np.random.default_rng(0)
    for _ in range(3):
        params = BarParams(alpha=tuple(rng.random(7) * 3), capacity=2.5, num_agents=10)
        assert bar_optimum(params) == pytest.approx(brute_force_optimum(params), abs=1e-12)


def test_optimum_examples():
    # 42 / e, 7 * 6 / e and 6 * 6 / e + 132 * exp(-22) from 30-digit mpmath
    assert bar_optimum(BarParams.preset("single_night")) == pytest.approx(15.4509365292005775, abs=1e-12)
    assert bar_optimum(BarParams.preset("uniform", num_agents=42)) == pytest.approx(15.4509365292005775, abs=1e-12)
    assert bar_optimum(BarParams.preset("uniform")) == pytest.approx(13.2436599189929024, abs=1e-12)


def test_trial_of_one_week():
    assert run_trial(ExperimentConfig(weeks=1), 0).shape == (1,)


@pytest.mark.parametrize(
    "cfg",
    [
        ExperimentConfig(weeks=40, reward="ud"),
        ExperimentConfig(weeks=40, reward="gr", alpha_preset="single_night"),
        ExperimentConfig(weeks=40, partition_kind="random_of_3"),
        SMALL_LF.replace(tensor="random", partition_kind="random_of_3", macro_week=30, macro_window=20),
    ],
)
def test_trials_are_bit_identical(cfg):
    assert np.array_equal(run_trial(cfg, 42), run_trial(cfg, 42))
    assert not np.array_equal(run_trial(cfg, 42), run_trial(cfg, 43))


def test_world_utility_bookkeeping():
    res = run_trial_detailed(ExperimentConfig(weeks=300), 1)
    assert res.total == pytest.approx(res.world_reward.sum(), rel=1e-9)


def test_batch_of_one_has_zero_std():
    cfg = ExperimentConfig(weeks=20, runs=1, seed=5)
    s = run_batch(cfg)
    assert np.array_equal(s.mean, run_trial(cfg, 5))
    assert np.all(s.std == 0)


def test_batch_uses_consecutive_seeds():
    cfg = ExperimentConfig(weeks=15, runs=3, seed=10)
    s = run_batch(cfg)
    for i in range(3):
        assert np.array_equal(s.runs[i], run_trial(cfg, 10 + i))
    assert s.weeks == 15 and np.all(s.std >= 0)


def test_identical_runs_have_zero_std():
    s = RunSeries(mean=np.ones(3), std=np.zeros(3), runs=np.ones((2, 3)))
    assert np.all(s.runs.std(axis=0) == 0)


def test_parallel_batch_matches_serial():
    cfg = SMALL_LF.replace(runs=3, weeks=30)
    assert format_csv(run_batch(cfg, workers=2)) == format_csv(run_batch(cfg))


def test_leader_follower_history_respects_dynamics():
    state = init_trial(SMALL_LF, 0)
    for _ in range(20):
        step(state)
    acts = state.history.actions
    assert np.all(acts[1::3] == acts[0::3]) and np.all(acts[2::3] == acts[0::3])
    assert acts.min() >= 1


def test_macrolearning_switches_partition_and_keeps_estimates():
    cfg = SMALL_LF.replace(partition_kind="random_of_3", macro_week=50, macro_window=50, macro_reset="none")
    state = init_trial(cfg, 3)
    for _ in range(50):
        step(state)
    before = state.population.estimates.copy()
    temp = state.population.temperature
    apply_macrolearning(state, 50, 50)
    assert keeps_triples_together(state.partition)
    assert np.array_equal(state.population.estimates, before)
    assert state.population.temperature == temp


def test_macrolearning_reset_options():
    for reset, reheated, wiped in [("temperature", True, False), ("full", True, True)]:
        cfg = SMALL_LF.replace(macro_week=50, macro_window=50, macro_reset=reset)
        state = init_trial(cfg, 3)
        for _ in range(50):
            step(state)
        apply_macrolearning(state, 50, 50)
        assert (state.population.temperature == cfg.initial_temperature) == reheated
        assert (not state.population.estimates.any()) == wiped


def test_without_macrolearning_partition_never_changes():
    cfg = SMALL_LF.replace(partition_kind="random_of_3")
    res = run_trial_detailed(cfg, 2)
    assert res.regrouped is None
    assert res.partition == make_partition("random_of_3", 9, np.random.default_rng(np.random.SeedSequence(2).spawn(3)[1]))


def test_moving_average_and_first_crossing():
    x = np.r_[np.zeros(100), np.ones(100)]
    assert np.allclose(moving_average(np.arange(5), 2), [0.5, 1.5, 2.5, 3.5])
    assert first_week_reaching(x, 0.8, width=50) == 140
    assert first_week_reaching(x, 2.0) == math.inf


# config --------------------------------------------------------------------

def test_config_parsing():
    cfg = parse_config_text("# comment\nreward = gr  # inline\nweeks=10\nmacro_week = none\n")
    assert cfg.reward == "gr" and cfg.weeks == 10 and cfg.macro_week is None
    assert parse_config_text("reward = wl").reward == "wl"


def test_unknown_key_names_line():
    with pytest.raises(ConfigError, match=r":3: unknown key 'rewrd'"):
        parse_config_text("weeks = 5\n\nrewrd = wl\n")


@pytest.mark.parametrize(
    "text",
    [
        "weeks = 0",
        "reward = best",
        "problem = leader_follower\nreward = ud",
        "problem = bar\nmacro_week = 50",
        "problem = leader_follower\nweeks = 100\nmacro_week = 100",
        "learning_rate = 2",
        "weeks = many",
        "just words",
    ],
)
def test_invalid_configs_rejected(text):
    with pytest.raises(ConfigError):
        parse_config_text(text)


def test_aliases():
    cfg = ExperimentConfig(problem="lf", tensor="worst", partition_kind="team", alpha_preset="single")
    assert (cfg.problem, cfg.tensor, cfg.partition_kind, cfg.alpha_preset) == (
        "leader_follower", "worst_case", "team_of_3", "single_night",
    )


@given(
    st.sampled_from(["ud", "gr", "wl"]),
    st.integers(1, 10**6),
    st.integers(0, 2**31),
    st.floats(1e-3, 1.0),
    st.sampled_from(["singleton", "team_of_3", "random_of_3"]),
)
def test_config_round_trip(reward, weeks, seed, eta, kind):
    cfg = ExperimentConfig(reward=reward, weeks=weeks, seed=seed, learning_rate=eta, partition_kind=kind)
    assert parse_config_text(cfg.to_text()) == cfg


def test_file_and_overrides(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text("reward = ud\nweeks = 7\n")
    cfg = parse_config(path, {"weeks": 9, "seed": None})
    assert cfg.reward == "ud" and cfg.weeks == 9 and cfg.seed == 0


def test_missing_config_file(tmp_path):
    with pytest.raises(OSError, match="nope.cfg"):
        parse_config(tmp_path / "nope.cfg")


# csv -------------------------------------------------------------------------

def test_empty_series_writes_header_only(tmp_path):
    path = tmp_path / "out.csv"
    write_csv(None, path)
    assert path.read_bytes() == b"week,mean_world_reward,std_world_reward\n"


def test_csv_format(tmp_path):
    s = RunSeries(mean=np.array([1.0, 2.5]), std=np.array([0.0, 0.125]), runs=np.zeros((1, 2)))
    path = tmp_path / "out.csv"
    write_csv(s, path)
    assert path.read_bytes() == (
        b"week,mean_world_reward,std_world_reward\n1,1.000000,0.000000\n2,2.500000,0.125000\n"
    )


def test_write_csv_reports_path(tmp_path):
    with pytest.raises(OSError, match="missing"):
        write_csv(None, tmp_path / "missing" / "x.csv")


# cli -------------------------------------------------------------------------

def test_cli_run_is_byte_reproducible(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("problem = lf\nnum_leaders = 3\nweeks = 40\nruns = 2\n")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(["run", "--config", str(cfg), "--partition", "random", "--seed", "4", "--out", str(a)]) == 0
    assert cli.main(["run", "--config", str(cfg), "--partition", "random", "--seed", "4", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert lines[0] == "week,mean_world_reward,std_world_reward" and len(lines) == 41


def test_cli_flags_override_file(tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("weeks = 40\nruns = 1\n")
    assert cli.main(["run", "--config", str(cfg), "--weeks", "3", "--reward", "ud", "--alpha", "single"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 4


def test_cli_config_error_exit_code(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("rewrd = wl\n")
    assert cli.main(["run", "--config", str(cfg)]) == 2
    assert "bad.cfg:1: unknown key 'rewrd'" in capsys.readouterr().err
    assert cli.main(["run", "--problem", "lf", "--reward", "ud"]) == 2
    assert cli.main(["run", "--config", str(tmp_path / "absent.cfg")]) == 2


def test_cli_optimum(capsys):
    assert cli.main(["optimum", "--alpha", "single", "--agents", "168"]) == 0
    assert capsys.readouterr().out.strip() == "15.450937"
