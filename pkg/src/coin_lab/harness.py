"""Experiment configuration, seeded trial loop, batching and CSV output."""

from __future__ import annotations

import dataclasses
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from coin_lab import bar, leader
from coin_lab.core import JointHistory, SubworldPartition, WorldUtilityAccumulator, make_partition
from coin_lab.learner import LearnerParams, Population
from coin_lab.macrolearn import apply_macrolearning


class ConfigError(ValueError):
    pass


# short spellings accepted on the command line and in config files
ALIASES = {
    "problem": {"lf": "leader_follower"},
    "alpha_preset": {"single": "single_night"},
    "tensor": {"worst": "worst_case"},
    "partition_kind": {"team": "team_of_3", "random": "random_of_3"},
}

CHOICES = {
    "problem": ("bar", "leader_follower"),
    "reward": ("ud", "gr", "wl"),
    "alpha_preset": tuple(bar.ALPHA_PRESETS),
    "tensor": ("worst_case", "random"),
    "partition_kind": ("singleton", "team_of_3", "random_of_3"),
    "macro_reset": ("none", "temperature", "full"),
}


@dataclass(frozen=True)
class ExperimentConfig:
    problem: str = "bar"
    reward: str = "wl"
    alpha_preset: str = "uniform"
    tensor: str = "worst_case"
    partition_kind: str = "singleton"
    weeks: int = 3000
    runs: int = 20
    seed: int = 0
    macro_week: Optional[int] = None
    macro_window: int = 100
    macro_reset: str = "temperature"
    learning_rate: float = 0.1
    initial_temperature: float = 1.0
    temperature_decay: float = 0.995
    min_temperature: float = 0.001
    initial_estimate: float = 0.0
    num_agents: int = 168
    num_leaders: int = 56
    capacity: float = 6.0

    def __post_init__(self):
        for name, options in CHOICES.items():
            value = ALIASES.get(name, {}).get(getattr(self, name), getattr(self, name))
            object.__setattr__(self, name, value)
            if value not in options:
                raise ConfigError(f"{name} must be one of {options}, got {value!r}")
        if self.weeks < 1 or self.runs < 1:
            raise ConfigError("weeks and runs must be at least 1")
        if self.macro_week is not None:
            if self.problem != "leader_follower":
                raise ConfigError("macrolearning is only defined for the leader-follower problem")
            if not self.macro_window <= self.macro_week < self.weeks:
                raise ConfigError(
                    f"macro_week must satisfy macro_window <= macro_week < weeks, got {self.macro_week}"
                )
        if self.problem == "leader_follower" and self.reward != "wl":
            raise ConfigError("the leader-follower problem only uses the wl reward")
        try:
            self.learner_params()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def learner_params(self) -> LearnerParams:
        return LearnerParams(
            learning_rate=self.learning_rate,
            initial_temperature=self.initial_temperature,
            temperature_decay=self.temperature_decay,
            min_temperature=self.min_temperature,
            initial_estimate=self.initial_estimate,
        )

    def bar_params(self) -> bar.BarParams:
        return bar.BarParams.preset(self.alpha_preset, capacity=self.capacity, num_agents=self.num_agents)

    @property
    def agent_count(self) -> int:
        return self.num_agents if self.problem == "bar" else 3 * self.num_leaders

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            lines.append(f"{f.name} = {'none' if value is None else value}")
        return "\n".join(lines) + "\n"


def _coerce(name: str, raw: str):
    kind = {f.name: f.type for f in fields(ExperimentConfig)}[name]
    if raw.lower() == "none" and "Optional" in str(kind):
        return None
    if "int" in str(kind):
        return int(raw)
    if "float" in str(kind):
        return float(raw)
    return raw


def parse_config_text(text: str, overrides: dict | None = None, source: str = "<config>") -> ExperimentConfig:
    """Parse flat ``key = value`` lines; ``#`` starts a comment."""
    known = {f.name for f in fields(ExperimentConfig)}
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _coerce(key, raw)
        except ValueError:
            raise ConfigError(f"{source}:{lineno}: bad value {raw!r} for {key}") from None
    for key, value in (overrides or {}).items():
        if key not in known:
            raise ConfigError(f"unknown key {key!r}")
        if value is not None:
            values[key] = _coerce(key, str(value)) if isinstance(value, str) else value
    return ExperimentConfig(**values)


def parse_config(path=None, overrides: dict | None = None) -> ExperimentConfig:
    if path is None:
        return parse_config_text("", overrides)
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text, overrides, source=str(path))


@dataclass
class TrialState:
    """Everything that evolves inside one trial."""

    config: ExperimentConfig
    population: Population
    partition: SubworldPartition
    history: JointHistory
    utility: WorldUtilityAccumulator = field(default_factory=WorldUtilityAccumulator)
    tensor: Optional[leader.RewardTensor] = None
    regrouped: Optional[SubworldPartition] = None


@dataclass
class TrialResult:
    world_reward: np.ndarray
    partition: SubworldPartition
    regrouped: Optional[SubworldPartition]
    total: float


def init_trial(config: ExperimentConfig, trial_seed: int) -> TrialState:
    learner_ss, partition_ss, tensor_ss = np.random.SeedSequence(trial_seed).spawn(3)
    n = config.agent_count
    tensor = None
    if config.problem == "leader_follower":
        if config.tensor == "worst_case":
            tensor = leader.build_worst_case_tensor()
        else:
            tensor = leader.random_tensor(np.random.default_rng(tensor_ss))
    return TrialState(
        config=config,
        population=Population(n, config.learner_params(), np.random.default_rng(learner_ss)),
        partition=make_partition(config.partition_kind, n, np.random.default_rng(partition_ss)),
        history=JointHistory(n, capacity=config.weeks),
        tensor=tensor,
    )


def step(state: TrialState, bar_params: bar.BarParams | None = None) -> float:
    """Advance one week; returns the realized world reward."""
    cfg = state.config
    pop = state.population
    intents = pop.select()
    if cfg.problem == "bar":
        realized = intents
        rewards, g = bar.agent_rewards(realized, cfg.reward, bar_params or cfg.bar_params(), state.partition)
    else:
        realized = leader.enforce_dynamics(intents, leader.TripleLayout(cfg.num_leaders))
        rewards, g = leader.lf_agent_rewards(realized, state.tensor, state.partition)
    state.history.record(realized)
    state.utility.add(g)
    # followers learn on their own intents; only their realized night is overridden
    pop.update(intents, rewards)
    pop.decay()
    return g


def run_trial_detailed(config: ExperimentConfig, trial_seed: int) -> TrialResult:
    state = init_trial(config, trial_seed)
    bp = config.bar_params() if config.problem == "bar" else None
    out = np.empty(config.weeks)
    for t in range(config.weeks):
        out[t] = step(state, bp)
        if config.macro_week is not None and t + 1 == config.macro_week:
            apply_macrolearning(state, config.macro_week, config.macro_window)
    return TrialResult(out, state.partition, state.regrouped, state.utility.total)


def run_trial(config: ExperimentConfig, trial_seed: int) -> np.ndarray:
    """Per-week world reward of one seeded trial."""
    return run_trial_detailed(config, trial_seed).world_reward


@dataclass
class RunSeries:
    mean: np.ndarray
    std: np.ndarray
    runs: np.ndarray
    partitions: list = field(default_factory=list)
    regrouped: list = field(default_factory=list)

    @property
    def weeks(self) -> int:
        return len(self.mean)


def _trial_job(args):
    config, seed = args
    return run_trial_detailed(config, seed)


def run_batch(config: ExperimentConfig, workers: int = 1) -> RunSeries:
    """Run ``config.runs`` trials with seeds ``seed, seed+1, ...`` and average.

    With ``workers > 1`` trials run in separate processes; results are
    merged in seed order so the output does not depend on ``workers``.
    """
    jobs = [(config, config.seed + i) for i in range(config.runs)]
    if workers > 1 and config.runs > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_trial_job, jobs))
    else:
        results = [_trial_job(j) for j in jobs]
    runs = np.vstack([r.world_reward for r in results])
    return RunSeries(
        mean=runs.mean(axis=0),
        std=runs.std(axis=0),
        runs=runs,
        partitions=[r.partition for r in results],
        regrouped=[r.regrouped for r in results],
    )


def bar_optimum(params: bar.BarParams) -> float:
    """Best weekly world reward over all integer attendance profiles.

    ``best[n]`` holds the optimum for placing ``n`` agents on the nights
    processed so far; each night adds a max-plus convolution.
    """
    n = params.num_agents
    counts = np.arange(n + 1, dtype=float)
    best = np.full(n + 1, -np.inf)
    best[0] = 0.0
    for k in range(params.num_nights):
        g = params.alpha[k] * counts * np.exp(-counts / params.capacity)
        nxt = np.full(n + 1, -np.inf)
        for total in range(n + 1):
            nxt[total] = np.max(best[total::-1] + g[: total + 1])
        best = nxt
    return float(best[n])


def format_csv(series: RunSeries | None) -> str:
    buf = io.StringIO()
    buf.write("week,mean_world_reward,std_world_reward\n")
    if series is not None:
        for t, (m, s) in enumerate(zip(series.mean, series.std), 1):
            buf.write(f"{t},{m:.6f},{s:.6f}\n")
    return buf.getvalue()


def write_csv(series: RunSeries | None, path) -> None:
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            fh.write(format_csv(series))
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def moving_average(x, width: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if len(x) < width:
        return np.empty(0)
    c = np.cumsum(np.insert(x, 0, 0.0))
    return (c[width:] - c[:-width]) / width


def first_week_reaching(x, target: float, width: int = 50) -> float:
    """First (1-based) week at which the trailing ``width``-week average
    reaches ``target``; ``inf`` if it never does."""
    ma = moving_average(x, width)
    hit = np.flatnonzero(ma >= target)
    return float(hit[0] + width) if hit.size else math.inf
