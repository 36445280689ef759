"""Leader-follower environment.

Agents come in triples ``(3i, 3i+1, 3i+2)``: a leader and two followers
whose realized night is forced to the leader's. A week pays
``sum_i R[l_i, f1_i, f2_i]``, with ``R`` defined on all of {0..7}^3 so
that clamped (0) entries have a value too.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from coin_lab.core import NUM_NIGHTS, SubworldPartition, clamp_column

SIDE = NUM_NIGHTS + 1


@dataclass(frozen=True)
class TripleLayout:
    num_leaders: int = 56

    def __post_init__(self):
        if self.num_leaders < 1:
            raise ValueError("num_leaders must be positive")

    @property
    def num_agents(self) -> int:
        return 3 * self.num_leaders

    @property
    def leaders(self) -> np.ndarray:
        return np.arange(0, self.num_agents, 3)

    def triple_of(self, agent: int) -> int:
        return agent // 3


class RewardTensor:
    """Immutable 8x8x8 payoff table indexed by (leader, follower1, follower2)."""

    def __init__(self, values):
        values = np.array(values, dtype=float)
        if values.shape != (SIDE, SIDE, SIDE):
            raise ValueError(f"tensor must have shape {(SIDE,) * 3}, got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("tensor entries must be finite")
        values.setflags(write=False)
        self.values = values

    def __getitem__(self, key):
        return self.values[key]

    def __eq__(self, other):
        return isinstance(other, RewardTensor) and np.array_equal(self.values, other.values)

    def diagonal(self) -> np.ndarray:
        """R[l, l, l] for l = 1..7."""
        n = np.arange(1, SIDE)
        return self.values[n, n, n]

    def max_world_reward(self, layout: TripleLayout) -> float:
        return layout.num_leaders * float(self.diagonal().max())

    def min_world_reward(self, layout: TripleLayout) -> float:
        return layout.num_leaders * float(self.diagonal().min())

    def to_csv(self, path) -> None:
        path = Path(path)
        try:
            with path.open("w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["l", "f1", "f2", "value"])
                for (l, f1, f2), v in np.ndenumerate(self.values):
                    w.writerow([l, f1, f2, repr(float(v))])
        except OSError as exc:
            raise OSError(f"cannot write tensor to {path}: {exc}") from exc

    @classmethod
    def from_csv(cls, path) -> "RewardTensor":
        values = np.full((SIDE, SIDE, SIDE), np.nan)
        with Path(path).open(newline="") as fh:
            for row in csv.DictReader(fh):
                values[int(row["l"]), int(row["f1"]), int(row["f2"])] = float(row["value"])
        if np.isnan(values).any():
            raise ValueError(f"{path}: tensor CSV must list all {SIDE ** 3} entries")
        return cls(values)


def build_worst_case_tensor(num_nights: int = NUM_NIGHTS) -> RewardTensor:
    """Tensor on which leaders in their own subworld drive G to its minimum.

    Realized triples pay ``l / 7``; a triple with only the leader clamped
    pays twice that, so a lone leader's WL reward is ``-l / 7``. With the
    whole triple clamped the payoff is 0 and WL is ``+l / 7``.
    """
    if num_nights != NUM_NIGHTS:
        raise ValueError(f"only {NUM_NIGHTS} nights are supported")
    r = np.zeros((SIDE, SIDE, SIDE))
    v = np.arange(1, SIDE) / num_nights
    n = np.arange(1, SIDE)
    r[n, n, n] = v
    r[0, n, n] = 2 * v
    return RewardTensor(r)


def random_tensor(seed) -> RewardTensor:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return RewardTensor(rng.random((SIDE, SIDE, SIDE)))


def enforce_dynamics(intended_actions, layout: TripleLayout) -> np.ndarray:
    """Overwrite each follower's action with its leader's."""
    intents = np.asarray(intended_actions)
    if intents.shape != (layout.num_agents,):
        raise ValueError(
            f"expected {layout.num_agents} actions for {layout.num_leaders} leaders, got {intents.shape}"
        )
    return np.repeat(intents[::3], 3)


def _triple_rewards(columns: np.ndarray, tensor: RewardTensor) -> np.ndarray:
    t = np.asarray(columns, dtype=np.intp).reshape(*columns.shape[:-1], -1, 3)
    return tensor.values[t[..., 0], t[..., 1], t[..., 2]]


def lf_world_reward(column, tensor: RewardTensor, layout: TripleLayout) -> float:
    column = np.asarray(column)
    if column.shape != (layout.num_agents,):
        raise ValueError(f"column must have {layout.num_agents} entries")
    return float(_triple_rewards(column, tensor).sum())


def lf_wl_reward(subworld: Iterable[int], column, tensor: RewardTensor, layout: TripleLayout) -> float:
    clamped = clamp_column(column, subworld)
    return lf_world_reward(column, tensor, layout) - lf_world_reward(clamped, tensor, layout)


def lf_agent_rewards(
    column: np.ndarray,
    tensor: RewardTensor,
    partition: SubworldPartition,
) -> tuple[np.ndarray, float]:
    """WL reward for every agent (shared within a subworld) and the world reward."""
    column = np.asarray(column, dtype=np.intp)
    full = _triple_rewards(column, tensor)
    g = float(full.sum())
    member = partition.membership()
    clamped = np.where(member, 0, column[None, :])
    # triples without a clamped member cancel; only the differences survive
    diff = (full[None, :] - _triple_rewards(clamped, tensor)).sum(axis=1)
    return diff[partition.as_array()], g
