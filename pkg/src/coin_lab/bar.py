"""Bar-attendance environment.

Each night ``k`` pays ``alpha_k * y * exp(-y / c)`` for attendance ``y``;
the week's world reward is the sum over the seven nights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from coin_lab.core import CLAMPED, NUM_NIGHTS, SubworldPartition, clamp_column

ALPHA_PRESETS = {
    "uniform": (1.0,) * 7,
    "single_night": (0.0, 0.0, 0.0, 7.0, 0.0, 0.0, 0.0),
}


@dataclass(frozen=True)
class BarParams:
    alpha: tuple[float, ...] = ALPHA_PRESETS["uniform"]
    capacity: float = 6.0
    num_agents: int = 168

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(float(a) for a in self.alpha))
        if len(self.alpha) != NUM_NIGHTS:
            raise ValueError(f"alpha needs {NUM_NIGHTS} entries, got {len(self.alpha)}")
        if any(a < 0 for a in self.alpha):
            raise ValueError("alpha entries must be non-negative")
        if not self.capacity > 0:
            raise ValueError("capacity must be positive")
        if self.num_agents < 1:
            raise ValueError("num_agents must be positive")

    @classmethod
    def preset(cls, name: str, **kwargs) -> "BarParams":
        try:
            alpha = ALPHA_PRESETS[name]
        except KeyError:
            raise ValueError(f"unknown alpha preset {name!r}") from None
        return cls(alpha=alpha, **kwargs)

    @property
    def num_nights(self) -> int:
        return NUM_NIGHTS

    @property
    def alpha_array(self) -> np.ndarray:
        return np.asarray(self.alpha)


def gamma(night: int, y: float, params: BarParams) -> float:
    if not 1 <= night <= NUM_NIGHTS:
        raise ValueError(f"night must be in 1..{NUM_NIGHTS}, got {night}")
    if y < 0:
        raise ValueError(f"attendance must be non-negative, got {y}")
    return params.alpha[night - 1] * y * math.exp(-y / params.capacity)


def night_rewards(x, params: BarParams) -> np.ndarray:
    """Vectorized gamma over the trailing night axis of ``x``."""
    x = np.asarray(x, dtype=float)
    return params.alpha_array * x * np.exp(-x / params.capacity)


def attendance(week_actions: Sequence[int]) -> np.ndarray:
    """Per-night head count; clamped agents (action 0) are not counted."""
    actions = np.asarray(week_actions, dtype=np.intp)
    if actions.size and (actions.min() < 0 or actions.max() > NUM_NIGHTS):
        raise ValueError(f"actions must lie in 0..{NUM_NIGHTS}")
    return np.bincount(actions, minlength=NUM_NIGHTS + 1)[1:]


def world_reward(x, params: BarParams) -> float:
    return float(night_rewards(x, params).sum())


def ud_reward(night: int, x, params: BarParams) -> float:
    """Night ``night``'s reward split evenly among its attendees."""
    x_d = x[night - 1]
    if x_d < 1:
        raise ValueError(f"agent claims night {night} but its attendance is {x_d}")
    return gamma(night, x_d, params) / x_d


def gr_reward(x, params: BarParams) -> float:
    return world_reward(x, params)


def wl_reward(subworld: Iterable[int], week_actions, params: BarParams) -> float:
    """World reward minus the world reward with ``subworld`` clamped out."""
    full = world_reward(attendance(week_actions), params)
    clamped = world_reward(attendance(clamp_column(week_actions, subworld)), params)
    return full - clamped


def wl_reward_single(night: int, x, params: BarParams) -> float:
    """Singleton shortcut: only the attended night's count is needed."""
    x_d = x[night - 1]
    return gamma(night, x_d, params) - gamma(night, x_d - 1, params)


def agent_rewards(
    week_actions: np.ndarray,
    reward: str,
    params: BarParams,
    partition: SubworldPartition | None = None,
) -> tuple[np.ndarray, float]:
    """Reward for every agent plus the week's world reward.

    ``reward`` is one of ``"ud"``, ``"gr"`` or ``"wl"``. WL uses the
    singleton shortcut when ``partition`` is None or all-singleton.
    """
    actions = np.asarray(week_actions, dtype=np.intp)
    x = attendance(actions)
    per_night = night_rewards(x, params)
    g = float(per_night.sum())
    idx = actions - 1
    if reward == "gr":
        return np.full(actions.shape, g), g
    if reward == "ud":
        return per_night[idx] / x[idx], g
    if reward != "wl":
        raise ValueError(f"unknown reward {reward!r}")
    if partition is None or partition.num_subworlds == partition.num_agents:
        minus_one = night_rewards(np.eye(NUM_NIGHTS, dtype=float) * -1 + x, params)
        # minus_one[k] is the night-reward vector with one agent removed from night k
        return per_night[idx] - minus_one[idx, idx], g
    member = partition.membership()
    onehot = np.zeros((actions.size, NUM_NIGHTS + 1))
    onehot[np.arange(actions.size), actions] = 1.0
    removed = member.astype(float) @ onehot[:, 1:]
    clamped_g = night_rewards(x[None, :] - removed, params).sum(axis=1)
    return (g - clamped_g)[partition.as_array()], g


__all__ = [
    "ALPHA_PRESETS",
    "BarParams",
    "CLAMPED",
    "agent_rewards",
    "attendance",
    "gamma",
    "gr_reward",
    "night_rewards",
    "ud_reward",
    "wl_reward",
    "wl_reward_single",
    "world_reward",
]
