#!/usr/bin/env python3
"""Scattering amplitudes of one relative-energy channel.

Sweeps the relative energy across a finite well and a barrier of the same
|PE| and plots reflection/transmission probabilities. Below the barrier top
the interior wave is evanescent, yet tunneling keeps |B|^2 + |H|^2 = 1;
sharp transmission resonances appear where the interior phase 2 K2 D hits
multiples of pi.
"""

import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from twotime import SystemParams, solve_coefficients
from pathlib import Path

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

pe = 4.0
e = np.linspace(0.05, 12.0, 1200)

fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharey=True)
for ax, sign, label in ((axes[0], -1, "finite well"), (axes[1], +1, "barrier")):
    p = SystemParams(m=1.0, M=5.0, pe=sign * pe, D=0.9)
    B, F, G, H, K1, K2 = solve_coefficients(e, p)[:6]
    R = np.abs(B) ** 2
    T = np.abs(H) ** 2
    ax.plot(e / pe, R, label=r"$|B|^2$ (reflection)")
    ax.plot(e / pe, T, label=r"$|H|^2$ (transmission)")
    ax.plot(e / pe, R + T, "k--", lw=0.8, label=r"$|B|^2+|H|^2$")
    if sign > 0:
        ax.axvline(1.0, color="gray", lw=0.8)
        ax.text(1.03, 0.5, "barrier top", rotation=90, color="gray")
    ax.set_xlabel(r"$E_{rel}/|PE|$")
    ax.set_title(label)
    ax.legend(loc="center right", fontsize=8)
axes[0].set_ylabel("probability")
fig.tight_layout()
fig.savefig(OUT / "01_coefficients.png", dpi=130)
print(f"wrote {OUT / '01_coefficients.png'}")

p = SystemParams(m=1.0, M=5.0, pe=pe, D=0.9)
B, F, G, H, K1, K2 = solve_coefficients(e, p)[:6]
defect = np.abs(K1 * (1 - np.abs(B) ** 2) - K1 * np.abs(H) ** 2)
print(f"max flux defect over the sweep: {defect.max():.2e}")
resonances = e[1:-1][(np.abs(H)[1:-1] > np.abs(H)[:-2])
                     & (np.abs(H)[1:-1] > np.abs(H)[2:])
                     & (np.abs(H)[1:-1] > 0.999)]
print(f"transmission resonances at E_rel/|PE| = "
      f"{np.round(resonances / pe, 3)}")
