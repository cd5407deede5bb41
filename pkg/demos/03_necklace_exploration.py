"""Boundary-length dynamics of the delta-necklace exploration.

Run with ``python demos/03_necklace_exploration.py``.
"""

# %% [markdown]
# Each necklace consumes delta units of quantum natural time. Its top T
# (the length removed from the boundary) and bottom B (the length added)
# satisfy B - T = X_after - X_before exactly, because lengths are stored
# on a 2^-32 grid.

# %%
from pathlib import Path

import numpy as np

from lqg_lab.cli import emit_svg
from lqg_lab.qle_boundary import (build_necklace_ledger, calibration_constant, distance_time_change,
                                  explore_batch, marked_point_walk, step_count_distance)

out = Path(__file__).with_name("out")
out.mkdir(exist_ok=True)

led = build_necklace_ledger(1e-3, 2000, 4.0, stream=6)
print("necklaces:", len(led), " exact conservation:",
      bool(np.all(led.bottom - led.top == led.x_after - led.x_before)))

# %% [markdown]
# A marked point moves whenever the glued arc covers it, which happens
# with probability about c delta^{2/3} / X. Counting its moves and scaling
# by delta^{1/3} / c tracks the quantum distance clock int dt / X.

# %%
c = calibration_constant(led.top, led.delta)
walk = marked_point_walk(led, 1, stream=7)
steps = step_count_distance(walk, led, c)
clock = distance_time_change(led.boundary_path())
print(f"calibration c = {c:.3f}; moves = {int(walk.hit_counts()[0])}")
print(f"step-count distance {steps.values[-1]:.3f} vs clock {clock.distance[len(steps) - 1]:.3f}")
emit_svg([{"name": "step count", "x": steps.times[::20], "y": steps.values[::20]},
          {"name": "distance clock", "x": clock.natural[::20], "y": clock.distance[::20]}],
         {"title": "marked-point moves against the distance clock", "xlabel": "natural time"},
         out / "step_count.svg")

# %% [markdown]
# Over unit natural time the number of moves grows like delta^{-1/3}.

# %%
deltas = np.array([1e-2, 10 ** -2.5, 1e-3])
counts = [explore_batch(500, 4.0, d, 1, stream=8 + i, necklaces=int(round(1 / d))).hits[:, 0].mean()
          for i, d in enumerate(deltas)]
print("hit-count slope:", np.polyfit(np.log(deltas), np.log(counts), 1)[0], "(target -1/3)")
