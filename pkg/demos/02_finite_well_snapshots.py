#!/usr/bin/env python3
"""Synchronous joint PDF of a particle crossing a moving finite well.

Three equal-interval snapshots in the (x2, x1) plane. The packet comes in
as a single peak (a), overlaps its own reflection while crossing the well
(type I fringes near the x1 = x2 - D line), and leaves as a reflected peak
(b) plus a transmitted peak (c). White dashed lines mark x1 = x2 +- D.
"""

import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
from pathlib import Path

from twotime import (GridSpec, VelocityPair, classical_recoil, preset,
                     snapshot_series)
from twotime.cli import build_source

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

cfg = preset("fig1")
wg = build_source(cfg)
grids = snapshot_series(wg, cfg.grid, cfg.times, normalization="max1")

v0, V0 = cfg.wavegroup.v0, cfg.wavegroup.V0
v_out, V_out = classical_recoil(VelocityPair(v0, V0), cfg.system)
print(f"well depth {cfg.system.pe:.2f}, recoil velocities "
      f"v'={v_out:.3f}, V'={V_out:.3f}")

fig, axes = plt.subplots(1, 3, figsize=(13, 4.2), sharey=True)
for ax, t, fg in zip(axes, cfg.times, grids):
    ax.imshow(fg.values, origin="lower", aspect="auto", cmap="magma",
              extent=(fg.col_coords[0], fg.col_coords[-1],
                      fg.row_coords[0], fg.row_coords[-1]))
    for s in (-1, +1):
        x2 = fg.col_coords
        ax.plot(x2, x2 + s * cfg.system.D, "w--", lw=0.7)
    ax.set_xlabel("$x_2$")
    ax.set_title(f"t = {t}")
    ax.set_ylim(fg.row_coords[0], fg.row_coords[-1])
axes[0].set_ylabel("$x_1$")
axes[0].annotate("a", (V0 * cfg.times[0], v0 * cfg.times[0]), color="w",
                 fontsize=14)
t2 = cfg.times[2]
t_c = -cfg.system.D / (v0 - V0)
axes[2].annotate("b", (V0 * t_c + V_out * (t2 - t_c),
                       v0 * t_c + v_out * (t2 - t_c)), color="w", fontsize=14)
axes[2].annotate("c", (V0 * t2, v0 * t2), color="w", fontsize=14)
fig.tight_layout()
fig.savefig(OUT / "02_finite_well_snapshots.png", dpi=130)
print(f"wrote {OUT / '02_finite_well_snapshots.png'}")
