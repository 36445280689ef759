# %% [markdown]
# # The bar problem: UD vs GR vs WL
#
# 168 agents, capacity 6, the two night-weight presets. Each curve is the
# per-week world reward averaged over 20 seeded runs.

# %%
from pathlib import Path

import numpy as np

from coin_lab import BarParams, ExperimentConfig, bar_optimum, run_batch, write_csv
from coin_lab.harness import first_week_reaching

out = Path("demo_output")
out.mkdir(exist_ok=True)
base = ExperimentConfig(problem="bar", weeks=3000, runs=20)

curves = {}
for preset in ("single_night", "uniform"):
    opt = bar_optimum(BarParams.preset(preset))
    print(f"\n{preset}: optimum {opt:.4f}")
    for reward in ("wl", "gr", "ud"):
        s = run_batch(base.replace(alpha_preset=preset, reward=reward))
        curves[preset, reward] = s
        write_csv(s, out / f"bar_{preset}_{reward}.csv")
        t80 = first_week_reaching(s.mean, 0.8 * opt)
        marks = " ".join(f"{s.mean[t:t + 100].mean():6.2f}" for t in (0, 500, 1000, 2000, 2900))
        print(f"  {reward}: {marks}   reaches 80% at week {t80:g}")

# %% [markdown]
# With a single night of value, UD rewards pull everyone onto that night and
# the world reward collapses. WL agents leave until six remain.

# %%
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharey=False)
    for ax, preset in zip(axes, ("single_night", "uniform")):
        for reward in ("wl", "gr", "ud"):
            ax.plot(curves[preset, reward].mean, label=reward.upper())
        ax.axhline(bar_optimum(BarParams.preset(preset)), color="k", lw=0.5, ls="--")
        ax.set_title(preset)
        ax.set_xlabel("week")
    axes[0].set_ylabel("world reward")
    axes[0].legend()
    fig.savefig(out / "bar.png", dpi=120)
