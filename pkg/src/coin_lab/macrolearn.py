"""Run-time regrouping of agents into correlated triples."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from coin_lab.core import JointHistory, SubworldPartition


@dataclass(frozen=True)
class CorrelationMatrix:
    m: np.ndarray
    window: int


def estimate_correlations(history: JointHistory, window: int, end_week: int | None = None) -> CorrelationMatrix:
    """Fraction of the ``window`` weeks before ``end_week`` on which two agents
    picked the same night.

    Night labels are categorical, so agreement frequency is used rather
    than a product-moment correlation of night indices.
    """
    if end_week is None:
        end_week = history.num_weeks
    if window < 1:
        raise ValueError("window must be at least 1")
    if end_week > history.num_weeks or window > end_week:
        raise IndexError(
            f"window of {window} weeks ending at week {end_week} exceeds "
            f"the {history.num_weeks} simulated weeks"
        )
    block = history.actions[:, end_week - window : end_week].astype(np.intp)
    n = history.num_agents
    onehot = np.zeros((n, window, 8))
    onehot[np.arange(n)[:, None], np.arange(window)[None, :], block] = 1.0
    flat = onehot.reshape(n, -1)
    m = flat @ flat.T / window
    return CorrelationMatrix(m=m, window=window)


def regroup(corr: CorrelationMatrix | np.ndarray) -> SubworldPartition:
    """Greedy triple partition of the most correlated agents.

    Repeatedly seed a triple with the unassigned pair of highest
    correlation, then add the unassigned agent with the largest summed
    correlation to both. Ties go to the lowest agent ids.
    """
    m = np.asarray(corr.m if isinstance(corr, CorrelationMatrix) else corr, dtype=float)
    n = m.shape[0]
    if n % 3:
        raise ValueError(f"cannot split {n} agents into triples")
    free = np.ones(n, dtype=bool)
    groups = []
    upper = np.triu(np.ones((n, n), dtype=bool), k=1)
    while free.any():
        ok = upper & free[:, None] & free[None, :]
        # argmax on the masked matrix returns the first (lowest a, then b) maximum
        a, b = np.unravel_index(np.argmax(np.where(ok, m, -np.inf)), m.shape)
        score = np.where(free, m[a] + m[b], -np.inf)
        score[[a, b]] = -np.inf
        c = int(np.argmax(score))
        groups.append([int(a), int(b), c])
        free[[a, b, c]] = False
    return SubworldPartition.from_groups(groups)


def partition_score(m: np.ndarray, partition: SubworldPartition) -> float:
    """Sum of within-subworld pairwise correlations."""
    same = partition.as_array()[:, None] == partition.as_array()[None, :]
    return float(np.triu(np.where(same, m, 0.0), k=1).sum())


def best_triple_partition(m) -> SubworldPartition:
    """Exhaustive best triple partition; only practical for N <= 12."""
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    if n % 3:
        raise ValueError(f"cannot split {n} agents into triples")
    if n > 12:
        raise ValueError("exhaustive search limited to 12 agents")

    best = (-np.inf, None)

    def search(remaining, groups, score):
        nonlocal best
        if not remaining:
            if score > best[0]:
                best = (score, list(groups))
            return
        a, rest = remaining[0], remaining[1:]
        for i in range(len(rest)):
            for j in range(i + 1, len(rest)):
                b, c = rest[i], rest[j]
                left = [x for k, x in enumerate(rest) if k not in (i, j)]
                gain = m[a, b] + m[a, c] + m[b, c]
                search(left, groups + [[a, b, c]], score + gain)

    search(list(range(n)), [], 0.0)
    return SubworldPartition.from_groups(best[1])


def keeps_triples_together(partition: SubworldPartition) -> bool:
    """True if every leader shares a subworld with both of its followers."""
    a = partition.as_array()
    return bool(np.all(a[0::3] == a[1::3]) and np.all(a[0::3] == a[2::3]))


def apply_macrolearning(state, at_week: int, window: int):
    """Swap ``state.partition`` for correlation-based triples.

    ``state`` is a harness trial state. Learner estimates survive the
    switch. ``state.config.macro_reset`` selects what else happens:
    ``"temperature"`` re-heats the learners to their initial temperature,
    ``"full"`` also wipes the estimates, ``"none"`` leaves them untouched.
    WL rewards use the new partition from the following week on.
    """
    corr = estimate_correlations(state.history, window, end_week=at_week)
    state.partition = regroup(corr)
    state.regrouped = state.partition
    reset = state.config.macro_reset
    if reset in ("temperature", "full"):
        state.population.reheat()
    if reset == "full":
        state.population.reset_estimates()
    return state
