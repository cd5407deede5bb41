"""Stable paths, the Lamperti transform, and the 3/2-stable CSBP.

Run with ``python demos/01_stable_paths_and_csbp.py``. Plots go to
``demos/out``.
"""

# %% [markdown]
# A spectrally positive 3/2-stable Lévy process with unit Laplace scale has
# E exp(-lam X_t) = exp(t lam^{3/2}). Time-changing it by the inverse of
# int dt / X turns it into a continuous-state branching process whose
# Laplace transform is exp(-y0 u_t(lam)).

# %%
from pathlib import Path

import numpy as np

from lqg_lab.cli import emit_svg
from lqg_lab.csbp import csbp_from_levy, laplace_transform, levy_from_csbp, simulate_csbp
from lqg_lab.stable_levy import StableSpec, sample_stable_path

out = Path(__file__).with_name("out")
out.mkdir(exist_ok=True)
spec = StableSpec.unit_scale(1.5)

# %% [markdown]
# One path, its CSBP image, and the round trip back.

# %%
levy = sample_stable_path(spec, 1.0, 3.0, 1e-3, stream=1)
y = csbp_from_levy(levy)
back = levy_from_csbp(y, levy.dt)
n = min(len(back), len(levy)) - 1
print(f"Lévy path: {len(levy)} grid points, {levy.jumps.shape[0]} recorded jumps")
print(f"CSBP path: lifetime {y.t_end:.4f}, absorbed={y.terminal is not None}")
print("round trip exact on the grid:", bool(np.array_equal(back.values[:n], levy.values[:n])))
emit_svg([{"name": "Levy X", "x": levy.times[::10], "y": levy.values[::10]},
          {"name": "CSBP Y", "x": y.times[::10], "y": y.values[::10]}],
         {"title": "Lamperti transform", "xlabel": "time"}, out / "lamperti.svg")

# %% [markdown]
# Batch simulation against the closed form. The z-scores should be O(1).

# %%
t, lams = 0.5, (0.5, 1.0, 2.0)
b = simulate_csbp(1.0, 50_000, [t], stream=2)
for lam in lams:
    w = np.exp(-lam * b.records[t])
    z = (w.mean() - laplace_transform(1.0, t, lam)) / (w.std(ddof=1) / np.sqrt(w.size))
    print(f"lambda={lam}: empirical {w.mean():.5f}  closed form {laplace_transform(1.0, t, lam):.5f}  z={z:+.2f}")
