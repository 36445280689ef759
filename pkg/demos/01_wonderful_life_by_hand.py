# %% [markdown]
# # Wonderful-life rewards by hand
#
# One bar week with a handful of agents. We compute the world reward, clamp
# an agent out, and compare the three per-agent reward signals.

# %%
import numpy as np

from coin_lab import BarParams, attendance, clamp, gamma, JointHistory, world_reward
from coin_lab.bar import agent_rewards, wl_reward

params = BarParams.preset("uniform", num_agents=10)
week = np.array([1, 1, 1, 1, 1, 1, 1, 2, 3, 3])
history = JointHistory.from_array(week[:, None])

x = attendance(week)
print("attendance per night:", x.tolist())
print("world reward:        ", round(world_reward(x, params), 4))

# %% [markdown]
# Clamping agent 0 sets its action to 0, which counts toward no night.

# %%
clamped = clamp(history, {0}, 0)
print("clamped column:", clamped.tolist())
print("world reward without agent 0:", round(world_reward(attendance(clamped), params), 4))
print("agent 0 WL reward:", round(wl_reward({0}, week, params), 4))
print("gamma(7) - gamma(6):", round(gamma(1, 7, params) - gamma(1, 6, params), 4))

# %% [markdown]
# Night 1 is over capacity, so each of its agents has a negative marginal
# contribution even though the uniform-division share is positive.

# %%
for kind in ("ud", "gr", "wl"):
    r, g = agent_rewards(week, kind, params)
    print(f"{kind}: " + " ".join(f"{v:+.3f}" for v in r))

# %% [markdown]
# Moving agent 0 from night 1 to the empty night 4 changes its WL reward by
# exactly the change in world reward.

# %%
moved = week.copy()
moved[0] = 4
dg = world_reward(attendance(moved), params) - world_reward(x, params)
dwl = wl_reward({0}, moved, params) - wl_reward({0}, week, params)
print(f"delta G = {dg:.6f}, delta WL = {dwl:.6f}")
