#!/usr/bin/env python3
"""Probability bookkeeping for the two-time joint PDF.

The local conservation law couples both time derivatives of the PDF to the
divergences of the two currents. Currents are differentiated analytically
from the branch phases; the outer derivatives are central differences, so
the residual measures pure truncation error and shrinks as h^2. The
segment form balances the probability change inside an interval against
the net flux through its endpoints.
"""

import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
from pathlib import Path

from twotime import (GridSpec, conservation_grid, current_snapshot, preset,
                     segment_residual)
from twotime.cli import build_source

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

cfg = preset("fig1")
wg = build_source(cfg)

g = GridSpec(x1=(-12, 12), x2=(-6, 6), n1=140, n2=140, t1=0.0, t2=0.0)
residual, summary = conservation_grid(wg, g)
print(f"conservation residual at t=0:  max {summary['max_rel_residual']:.2e}"
      f"  mean {summary['mean_rel_residual']:.2e}  (h = {summary['h']:.2e})")

for h_mult in (4.0, 2.0, 1.0):
    _, s = conservation_grid(wg, g, h=summary["h"] * h_mult)
    print(f"  h x{h_mult}: max residual {s['max_rel_residual']:.2e}")

j1 = current_snapshot(wg, g, "j1")
fig, axes = plt.subplots(1, 2, figsize=(10, 4.2))
im0 = axes[0].imshow(j1.values, origin="lower", aspect="auto", cmap="RdBu_r",
                     extent=(-6, 6, -12, 12),
                     vmin=-np.abs(j1.values).max(),
                     vmax=np.abs(j1.values).max())
axes[0].set_title("particle current $j_1$ at t = 0")
axes[0].set_xlabel("$x_2$")
axes[0].set_ylabel("$x_1$")
fig.colorbar(im0, ax=axes[0])
im1 = axes[1].imshow(np.log10(residual.values + 1e-16), origin="lower",
                     aspect="auto", cmap="viridis", extent=(-6, 6, -12, 12))
axes[1].set_title("log10 relative conservation residual")
axes[1].set_xlabel("$x_2$")
fig.colorbar(im1, ax=axes[1])
fig.tight_layout()
fig.savefig(OUT / "07_conservation.png", dpi=130)
print(f"wrote {OUT / '07_conservation.png'}")

rng = np.random.default_rng(0)
print("segment balance (d/dt of enclosed probability vs endpoint fluxes):")
for _ in range(3):
    a = rng.uniform(-6, -2)
    b = a + rng.uniform(2, 4)
    res, scale = segment_residual(wg, "x1", a, b, x_other=0.3,
                                  t1=0.0, t2=0.0, n=401)
    print(f"  x1 in [{a:+.2f}, {b:+.2f}]: relative defect {abs(res)/scale:.2e}")
