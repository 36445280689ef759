"""Framework-level pieces shared by both environments.

Actions are nights 1..7. The value 0 is reserved for clamped agents and
never produced by a learner.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

CLAMPED = 0
NUM_NIGHTS = 7

PARTITION_KINDS = ("singleton", "team_of_3", "random_of_3")


class JointHistory:
    """Realized actions of every agent for every simulated week.

    Stored as an ``(num_agents, capacity)`` int8 matrix that grows by one
    column per :meth:`record` call.
    """

    def __init__(self, num_agents: int, capacity: int = 0):
        if num_agents < 1:
            raise ValueError(f"num_agents must be >= 1, got {num_agents}")
        self.num_agents = num_agents
        self._actions = np.zeros((num_agents, max(capacity, 1)), dtype=np.int8)
        self.num_weeks = 0

    @classmethod
    def from_array(cls, actions) -> "JointHistory":
        actions = np.asarray(actions)
        if actions.ndim != 2:
            raise ValueError("actions must be a 2-d (agent, week) array")
        hist = cls(actions.shape[0], actions.shape[1])
        hist._actions[:, : actions.shape[1]] = actions
        hist.num_weeks = actions.shape[1]
        return hist

    @property
    def actions(self) -> np.ndarray:
        return self._actions[:, : self.num_weeks]

    def record(self, column) -> None:
        column = np.asarray(column)
        if column.shape != (self.num_agents,):
            raise ValueError(
                f"column must have shape ({self.num_agents},), got {column.shape}"
            )
        if self.num_weeks == self._actions.shape[1]:
            grown = np.zeros((self.num_agents, 2 * self._actions.shape[1]), dtype=np.int8)
            grown[:, : self.num_weeks] = self._actions
            self._actions = grown
        self._actions[:, self.num_weeks] = column
        self.num_weeks += 1

    def week(self, t: int) -> np.ndarray:
        if not 0 <= t < self.num_weeks:
            raise IndexError(f"week {t} outside simulated range 0..{self.num_weeks - 1}")
        return self._actions[:, t].copy()


@dataclass(frozen=True)
class SubworldPartition:
    """Exhaustive, disjoint assignment of agents to subworlds 0..K-1."""

    assignment: tuple[int, ...]

    def __post_init__(self):
        ids = sorted(set(self.assignment))
        if not self.assignment:
            raise ValueError("partition must cover at least one agent")
        if ids != list(range(len(ids))):
            raise ValueError("subworld ids must be contiguous integers starting at 0")

    @classmethod
    def from_groups(cls, groups: Iterable[Iterable[int]]) -> "SubworldPartition":
        groups = [sorted(g) for g in groups if len(list(g))]
        members = [a for g in groups for a in g]
        n = len(members)
        if sorted(members) != list(range(n)):
            raise ValueError("groups must be disjoint and cover agents 0..N-1")
        # canonical labelling: subworlds numbered by their smallest member
        groups.sort(key=lambda g: g[0])
        assignment = [0] * n
        for sw, g in enumerate(groups):
            for a in g:
                assignment[a] = sw
        return cls(tuple(assignment))

    @property
    def num_agents(self) -> int:
        return len(self.assignment)

    @property
    def num_subworlds(self) -> int:
        return max(self.assignment) + 1

    @property
    def groups(self) -> list[frozenset[int]]:
        out: list[set[int]] = [set() for _ in range(self.num_subworlds)]
        for agent, sw in enumerate(self.assignment):
            out[sw].add(agent)
        return [frozenset(g) for g in out]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.assignment, dtype=np.intp)

    def membership(self) -> np.ndarray:
        """Boolean ``(num_subworlds, num_agents)`` membership matrix."""
        arr = self.as_array()
        return arr[None, :] == np.arange(self.num_subworlds)[:, None]

    def canonical(self) -> frozenset[frozenset[int]]:
        return frozenset(self.groups)


@dataclass
class WorldUtilityAccumulator:
    per_week_reward: list[float] = field(default_factory=list)
    total: float = 0.0

    def add(self, reward: float) -> None:
        self.per_week_reward.append(float(reward))
        self.total += float(reward)


def clamp(history: JointHistory, subworld: Iterable[int], week: int) -> np.ndarray:
    """Week ``week`` of ``history`` with every agent in ``subworld`` set to 0."""
    members = _check_members(subworld, history.num_agents)
    column = history.week(week)
    column[members] = CLAMPED
    return column


def clamp_column(column: Sequence[int], subworld: Iterable[int]) -> np.ndarray:
    """Same as :func:`clamp` but on a bare action column."""
    out = np.array(column, copy=True)
    out[_check_members(subworld, len(out))] = CLAMPED
    return out


def _check_members(subworld: Iterable[int], num_agents: int) -> np.ndarray:
    members = np.fromiter((int(a) for a in subworld), dtype=np.intp)
    if members.size and (members.min() < 0 or members.max() >= num_agents):
        raise ValueError(f"subworld {sorted(members.tolist())} has ids outside 0..{num_agents - 1}")
    return members


def make_partition(kind: str, num_agents: int, seed: int | np.random.Generator | None = None) -> SubworldPartition:
    """Build one of the standard subworld layouts.

    ``team_of_3`` groups agents ``{3i, 3i+1, 3i+2}``; ``random_of_3``
    shuffles the agents with ``seed`` and cuts the permutation into
    consecutive triples.
    """
    if kind not in PARTITION_KINDS:
        raise ValueError(f"unknown partition kind {kind!r}; expected one of {PARTITION_KINDS}")
    if num_agents < 1:
        raise ValueError("num_agents must be positive")
    if kind == "singleton":
        return SubworldPartition(tuple(range(num_agents)))
    if num_agents % 3:
        raise ValueError(f"{kind} needs num_agents divisible by 3, got {num_agents}")
    if kind == "team_of_3":
        return SubworldPartition(tuple(a // 3 for a in range(num_agents)))
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    perm = rng.permutation(num_agents)
    return SubworldPartition.from_groups(perm.reshape(-1, 3).tolist())
