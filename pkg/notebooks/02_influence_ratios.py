# %% [markdown]
# # Amplification against a baseline
#
# Two independent ensembles, one with the amplification preset and one
# without. The ratio of ensemble means shows the boost during [100, 300) and
# whatever is left afterwards; total variation denoising strips the per-step
# sampling noise.

# %%
import matplotlib.pyplot as plt
import numpy as np

from collmind.config import get_preset
from collmind.denoise import tv_denoise
from collmind.metrics import ensemble_ratio
from collmind.simulation import run_ensemble

REPLICAS = 40  # raise for smoother curves; each replica takes about a second

amp = get_preset("amplification")
base = get_preset("baseline")
inf = run_ensemble(amp.params, amp.schedule, REPLICAS, master_seed=1)
ref = run_ensemble(base.params, base.schedule, REPLICAS, master_seed=2)

# %%
ratio, band = ensemble_ratio(inf.stats["news_target"], ref.stats["news_target"])
t = np.arange(ratio.shape[0])
fig, ax = plt.subplots()
ax.fill_between(t, ratio - band, ratio + band, alpha=0.3)
ax.plot(t, ratio, lw=0.6)
ax.plot(t, tv_denoise(ratio, 0.4), lw=2)
ax.axhline(1, color="k", lw=0.5)
ax.axvspan(100, 300, color="grey", alpha=0.1)
ax.set_ylabel("target news ratio")

# %% [markdown]
# Similarity of the target to the topics that started closest to it versus
# those that started furthest away.

# %%
top = inf.mean("sim_target_top") - ref.mean("sim_target_top")
bottom = inf.mean("sim_target_bottom") - ref.mean("sim_target_bottom")
fig, ax = plt.subplots()
ax.plot(t, top, label="top 20%")
ax.plot(t, bottom, label="bottom 20%")
ax.axhline(0, color="k", lw=0.5)
ax.legend()
plt.show()
