"""Segments between marks and the boundary length near extinction.

Run with ``python demos/04_segments_and_extinction.py``.
"""

# %% [markdown]
# With two marks the boundary splits into two arcs. In quantum distance
# time each arc length evolves as its own 3/2-stable CSBP, independent
# of the other one.

# %%
import numpy as np
from scipy import stats

from lqg_lab.csbp import u_t
from lqg_lab.qle_boundary import explore_batch, sup_collapse_samples

b = explore_batch(2000, 1.0, 1e-2, k=2, stream=9, distance_times=(0.25,), spacing="equal")
Y = b.segments_at[:, 0, :]
for lam in (1.0, 2.0):
    emp = np.exp(-lam * Y).mean(axis=0)
    print(f"lambda={lam}: E exp(-lam Y) per segment {emp.round(4)}  CSBP {np.exp(-0.5 * u_t(lam, 0.25)):.4f}")
theta = b.levy_time_at[:, 0, :]
Z = (Y - b.initial_segments) / theta ** (2 / 3)
print("rank correlation of normalized increments:", round(stats.spearmanr(Z[:, 0], Z[:, 1]).statistic, 4))

# %% [markdown]
# Read backward from extinction, the CSBP is the boundary length of a
# reverse exploration. Its supremum over the last r units of time,
# divided by r^2, has an r-free law.

# %%
a = sup_collapse_samples(0.5, 1000, stream=10)
c = sup_collapse_samples(1.0, 1000, stream=11)
print("median sup/r^2:", np.median(a).round(3), np.median(c).round(3),
      " KS p =", round(stats.ks_2samp(a, c).pvalue, 3))
