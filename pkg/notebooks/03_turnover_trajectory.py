# %% [markdown]
# # Where the comment profile travels
#
# Mean comment profiles of the turnover and baseline ensembles are embedded
# jointly (PCA to 50 dimensions, then exact t-SNE) so both paths share one
# map. Block means over 25 steps smooth the path.

# %%
import matplotlib.pyplot as plt
import numpy as np

from collmind.config import get_preset
from collmind.projection import project_trajectory
from collmind.simulation import run_ensemble

REPLICAS = 20

runs = {}
for seed, name in enumerate(("turnover_far", "baseline_far"), start=1):
    sc = get_preset(name)
    params = sc.params.replace(lambda_m=0.99)  # the baseline preset keeps 0.9
    runs[name] = run_ensemble(params, sc.schedule, REPLICAS, master_seed=seed)

# %%
traj = project_trajectory([r.mean_profiles for r in runs.values()], np.random.default_rng(0))
fig, ax = plt.subplots()
for name, tr in zip(runs, traj):
    ax.plot(*tr.smoothed.T, "-o", ms=3, label=name)
    ax.plot(*tr.smoothed[0], "k*")
ax.legend()

# %%
fig, ax = plt.subplots()
for name, r in runs.items():
    ax.plot(r.mean("kd_general_comment"), label=name)
ax.axvspan(100, 300, color="grey", alpha=0.1)
ax.set_ylabel("Kendall distance to general")
ax.legend()
plt.show()
