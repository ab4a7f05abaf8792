# %% [markdown]
# # One replica at the calibrated defaults
#
# A single 120-step run: which topics make the news, how the comment profile
# is shaped, and how far the comment ranking sits from the general ranking.

# %%
import matplotlib.pyplot as plt
import numpy as np

from collmind.rng import SeedSpec
from collmind.simulation import ModelParameters, run_simulation

params = ModelParameters(horizon=120)
rec = run_simulation(params, seed=SeedSpec(2024, 0), keep_news=True)
news = np.vstack(rec.news)
news.shape

# %% [markdown]
# Title frequency by tier against the general rank. Higher tiers concentrate
# on popular topics more strongly.

# %%
ranks = rec.general.ranks
order = np.argsort(ranks)
fig, ax = plt.subplots()
for q in range(params.n_tiers):
    counts = np.bincount(news[:, q], minlength=params.n_topics)[order]
    ax.loglog(ranks[order], counts / counts.sum(), ".", label=f"tier {q + 1}")
ax.set_xlabel("normalized general rank")
ax.set_ylabel("title frequency")
ax.legend()

# %% [markdown]
# Time-averaged comment profile, sorted.

# %%
profile = np.sort(rec.profiles.mean(axis=0))[::-1]
rank = np.arange(1, params.n_topics + 1)
slope = np.polyfit(np.log(rank), np.log(profile), 1)[0]
fig, ax = plt.subplots()
ax.loglog(rank, profile)
ax.set_title(f"comment profile, fitted slope {slope:.2f}")

# %%
fig, ax = plt.subplots()
ax.hist(rec.general.pair_weights, bins=80)
ax.set_xlabel("initial similarity")
np.median(rec.general.pair_weights)

# %%
fig, ax = plt.subplots()
ax.plot(rec.metrics["kd_general_comment"], label="comments")
ax.plot(rec.metrics["kd_general_community"], label="community")
ax.set_xlabel("step")
ax.set_ylabel("Kendall distance to general")
ax.legend()
plt.show()
