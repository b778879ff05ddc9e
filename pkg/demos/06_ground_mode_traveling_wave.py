#!/usr/bin/env python3
"""Ground-mode well: synchronous pattern and asynchronous well evolution.

With only the n = 1 mode, the particle substate fills the well while the
well substate stays narrow. Synchronously the PDF rides the diagonal
between the x1 = x2 +- D walls like a traveling wave. Measuring the
particle at a fixed (x1, t1) and scanning the well afterwards shows the
well substate oscillating: the particle standing wave is built from two
counter-propagating branches of different energies, and reflection hands
the well two energy components that beat against each other.
"""

import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
from pathlib import Path

from twotime import GridSpec, asynchronous_slice, preset, snapshot_series
from twotime.cli import build_source

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

cfg = preset("fig6")
wg = build_source(cfg)
grids = snapshot_series(wg, cfg.grid, cfg.times, normalization="max1")

fig, axes = plt.subplots(1, 4, figsize=(14, 3.8))
for ax, t, fg in zip(axes[:3], cfg.times, grids):
    ax.imshow(fg.values, origin="lower", aspect="auto", cmap="magma",
              extent=(fg.col_coords[0], fg.col_coords[-1],
                      fg.row_coords[0], fg.row_coords[-1]))
    x2 = fg.col_coords
    for s in (-1, +1):
        ax.plot(x2, x2 + s * cfg.system.D, "w--", lw=0.7)
    ax.set_title(f"synchronous, t = {t}")
    ax.set_xlabel("$x_2$")
axes[0].set_ylabel("$x_1$")

# asynchronous: freeze the particle at the first snapshot time
x1_fix, t1_fix = 0.3, cfg.times[0]
g = GridSpec(x1=(0, 1), x2=cfg.grid.x2, n1=2, n2=cfg.grid.n2,
             t2=(t1_fix, t1_fix + 0.12, 7))
sl = asynchronous_slice(wg, x1_fix, t1_fix, g)
offset = 1.1 * sl.values.max()
for r, t2 in enumerate(sl.row_coords):
    axes[3].plot(sl.col_coords, sl.values[r] + r * offset, "C0", lw=0.9)
axes[3].set_title(f"asynchronous: $x_1$={x1_fix} fixed, $t_2$ scan")
axes[3].set_xlabel("$x_2$")
axes[3].set_yticks([])
fig.tight_layout()
fig.savefig(OUT / "06_ground_mode.png", dpi=130)
print(f"wrote {OUT / '06_ground_mode.png'}")
print("lowest asynchronous trace equals the synchronous row:",
      np.array_equal(
          sl.values[0],
          snapshot_series(wg, GridSpec(x1=(x1_fix, x1_fix + 1),
                                       x2=cfg.grid.x2, n1=2, n2=cfg.grid.n2,
                                       t1=t1_fix, t2=t1_fix),
                          [t1_fix])[0].values[0]))
