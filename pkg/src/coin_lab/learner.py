"""Boltzmann microlearners.

Each agent keeps an expected-reward estimate per night, nudges the
estimate of the night it attended toward the reward it received, and
samples next week's night from a softmax over the estimates. The
temperature decays geometrically each week down to a floor.

:class:`LearnerState` is the single-agent form. :class:`Population`
holds every agent of one trial in a single array and is what the
harness runs; both follow the same update rules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from coin_lab.core import NUM_NIGHTS


@dataclass(frozen=True)
class LearnerParams:
    learning_rate: float = 0.1
    initial_temperature: float = 1.0
    temperature_decay: float = 0.995
    min_temperature: float = 0.001
    num_actions: int = NUM_NIGHTS
    initial_estimate: float = 0.0

    def __post_init__(self):
        if not 0 < self.learning_rate <= 1:
            raise ValueError("learning_rate must be in (0, 1]")
        if not self.initial_temperature > 0:
            raise ValueError("initial_temperature must be positive")
        if not 0 < self.temperature_decay <= 1:
            raise ValueError("temperature_decay must be in (0, 1]")
        if not self.min_temperature > 0:
            raise ValueError("min_temperature must be positive")
        if self.num_actions < 1:
            raise ValueError("num_actions must be positive")


def boltzmann_probabilities(estimates, temperature: float) -> np.ndarray:
    """Softmax of ``estimates / temperature`` along the last axis."""
    e = np.asarray(estimates, dtype=float)
    if not np.all(np.isfinite(e)):
        raise FloatingPointError("learner estimates contain non-finite values")
    z = (e - e.max(axis=-1, keepdims=True)) / temperature
    w = np.exp(z)
    return w / w.sum(axis=-1, keepdims=True)


@dataclass(frozen=True)
class LearnerState:
    estimates: tuple[float, ...]
    temperature: float
    rng: np.random.Generator

    @classmethod
    def initial(cls, params: LearnerParams, seed=None) -> "LearnerState":
        return cls(
            estimates=(params.initial_estimate,) * params.num_actions,
            temperature=params.initial_temperature,
            rng=np.random.default_rng(seed),
        )

    def probabilities(self) -> np.ndarray:
        return boltzmann_probabilities(self.estimates, self.temperature)


def select_action(state: LearnerState) -> int:
    """Sample a night (1-based). Advances ``state.rng``."""
    p = state.probabilities()
    return int(state.rng.choice(len(p), p=p)) + 1


def update(state: LearnerState, night: int, reward: float, params: LearnerParams) -> LearnerState:
    if not math.isfinite(reward):
        raise ValueError(f"reward must be finite, got {reward}")
    if not 1 <= night <= len(state.estimates):
        raise ValueError(f"night must be in 1..{len(state.estimates)}, got {night}")
    e = list(state.estimates)
    eta = params.learning_rate
    e[night - 1] = (1 - eta) * e[night - 1] + eta * reward
    return replace(state, estimates=tuple(e))


def decay_temperature(state: LearnerState, params: LearnerParams) -> LearnerState:
    t = max(params.min_temperature, params.temperature_decay * state.temperature)
    return replace(state, temperature=t)


class Population:
    """All learners of one trial, sharing one generator and one schedule.

    Agents draw in id order from ``rng`` so a trial is reproducible from
    its seed alone.
    """

    def __init__(self, num_agents: int, params: LearnerParams, rng: np.random.Generator):
        self.params = params
        self.rng = rng
        self.estimates = np.full((num_agents, params.num_actions), params.initial_estimate, dtype=float)
        self.temperature = params.initial_temperature

    @property
    def num_agents(self) -> int:
        return self.estimates.shape[0]

    def probabilities(self) -> np.ndarray:
        return boltzmann_probabilities(self.estimates, self.temperature)

    def select(self) -> np.ndarray:
        cdf = np.cumsum(self.probabilities(), axis=1)
        u = self.rng.random(self.num_agents)[:, None]
        picks = (cdf < u * cdf[:, -1:]).sum(axis=1)
        return np.minimum(picks, self.params.num_actions - 1) + 1

    def update(self, nights: np.ndarray, rewards: np.ndarray) -> None:
        rewards = np.asarray(rewards, dtype=float)
        if not np.all(np.isfinite(rewards)):
            raise ValueError("rewards must be finite")
        rows = np.arange(self.num_agents)
        cols = np.asarray(nights) - 1
        eta = self.params.learning_rate
        self.estimates[rows, cols] += eta * (rewards - self.estimates[rows, cols])

    def decay(self) -> None:
        p = self.params
        self.temperature = max(p.min_temperature, p.temperature_decay * self.temperature)

    def reheat(self, temperature: float | None = None) -> None:
        self.temperature = self.params.initial_temperature if temperature is None else temperature

    def reset_estimates(self) -> None:
        self.estimates.fill(self.params.initial_estimate)
