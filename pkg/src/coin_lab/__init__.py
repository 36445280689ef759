"""Collective-intelligence simulation lab.

Wonderful-life rewards, clamping, Boltzmann microlearners and
correlation-based subworld regrouping for the bar-attendance and
leader-follower problems.
"""

from coin_lab.core import (
    CLAMPED,
    JointHistory,
    SubworldPartition,
    WorldUtilityAccumulator,
    clamp,
    make_partition,
)
from coin_lab.bar import (
    BarParams,
    attendance,
    gamma,
    gr_reward,
    ud_reward,
    wl_reward,
    world_reward,
)
from coin_lab.learner import LearnerParams, LearnerState
from coin_lab.leader import (
    RewardTensor,
    TripleLayout,
    build_worst_case_tensor,
    enforce_dynamics,
    lf_wl_reward,
    lf_world_reward,
    random_tensor,
)
from coin_lab.macrolearn import estimate_correlations, regroup
from coin_lab.harness import (
    ExperimentConfig,
    RunSeries,
    bar_optimum,
    parse_config,
    run_batch,
    run_trial,
    write_csv,
)

__version__ = "0.1.0"
