"""Gaussian wavegroups: weighted superpositions of two-time eigenstates.

The barrier/finite-well group sums scattering eigenstates over a uniform
(v, V) velocity grid with Gaussian weights exp(-(V-V0)^2/2 dV^2)/sqrt(dV)
(and likewise for v); the infinite-well group combines a V quadrature with
a Gaussian mode sum weighted by exp(-[(n-n0) pi dx]^2). Sums run in a fixed
ascending order (outer velocity major) so results are bitwise reproducible;
trapezoid quadrature weights make the sums converge as node counts grow.

Wavegroups are not analytically normalized; the overall scale is arbitrary,
as only PDF shapes are meaningful.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .branches import BranchTable, WaveSource
from .eigen import _barrier_table, _well_table, well_mode_velocity
from .system import SystemParams

WEIGHT_FLOOR = 1e-8


@dataclass(frozen=True)
class BarrierWavegroupConfig:
    """Velocity distributions and quadrature for the barrier/finite well."""

    v0: float
    dv: float
    V0: float
    dV: float
    n_v: int = 64
    n_V: int = 64
    span: float = 4.0

    def __post_init__(self):
        if not (self.dv > 0 and self.dV > 0):
            raise ValueError("velocity widths dv, dV must be positive")
        if self.n_v < 2 or self.n_V < 2:
            raise ValueError("quadrature counts n_v, n_V must be >= 2")
        if not self.span > 0:
            raise ValueError("span must be positive")


@dataclass(frozen=True)
class WellWavegroupConfig:
    """Mode distribution and well-velocity quadrature for the infinite well."""

    n0: float
    dx: float
    V0: float
    dV: float
    n_V: int = 64
    span: float = 4.0
    n_range: tuple[int, int] | None = None

    def __post_init__(self):
        if not self.dx > 0:
            raise ValueError("mode-distribution width dx must be positive")
        if not self.dV > 0:
            raise ValueError("velocity width dV must be positive")
        if self.n_V < 2:
            raise ValueError("quadrature count n_V must be >= 2")
        if not self.span > 0:
            raise ValueError("span must be positive")
        if self.n_range is not None:
            lo, hi = self.n_range
            if lo < 1 or hi < lo:
                raise ValueError("n_range must satisfy 1 <= lo <= hi")

    def modes(self) -> np.ndarray:
        """Mode indices with Gaussian weight above the exclusion floor."""
        if self.n_range is not None:
            lo, hi = self.n_range
        else:
            half = np.sqrt(-np.log(WEIGHT_FLOOR)) / (np.pi * self.dx)
            lo = max(1, int(np.floor(self.n0 - half)))
            hi = max(1, int(np.ceil(self.n0 + half)))
        n = np.arange(lo, hi + 1)
        keep = self.mode_weights(n) >= WEIGHT_FLOOR
        return n[keep]

    def mode_weights(self, n) -> np.ndarray:
        return np.exp(-((np.asarray(n, float) - self.n0) * np.pi * self.dx) ** 2)


def _trapezoid_nodes(center: float, sigma: float, span: float, count: int):
    """Uniform nodes on center +- span*sigma with trapezoid weights."""
    nodes = np.linspace(center - span * sigma, center + span * sigma, count)
    h = nodes[1] - nodes[0]
    w = np.full(count, h)
    w[0] = w[-1] = 0.5 * h
    return nodes, w


class BarrierWavegroup(WaveSource):
    """Double Gaussian velocity sum of barrier/finite-well eigenstates.

    At t1 = t2 = 0 the particle and barrier substates are centered at the
    origin; snapshot sequences therefore straddle t = 0, with negative times
    showing the incident approach.
    """

    def __init__(self, cfg: BarrierWavegroupConfig, params: SystemParams, *,
                 pe_time_phase: bool = True):
        if params.infinite_well:
            raise ValueError("barrier wavegroups need a finite potential")
        self.cfg = cfg
        self.params = params
        v_nodes, wv = _trapezoid_nodes(cfg.v0, cfg.dv, cfg.span, cfg.n_v)
        V_nodes, wV = _trapezoid_nodes(cfg.V0, cfg.dV, cfg.span, cfg.n_V)
        gv = np.exp(-((v_nodes - cfg.v0) ** 2) / (2 * cfg.dv ** 2)) / np.sqrt(cfg.dv)
        gV = np.exp(-((V_nodes - cfg.V0) ** 2) / (2 * cfg.dV ** 2)) / np.sqrt(cfg.dV)

        # V-major ascending order; v ascending within each V
        VV, vv = [a.ravel() for a in np.meshgrid(V_nodes, v_nodes, indexing="ij")]
        ww = (wV * gV)[:, None] * (wv * gv)[None, :]
        ww = ww.ravel()
        live = vv != VV
        self.skipped_nodes = [(float(v), float(V))
                              for v, V in zip(vv[~live], VV[~live])]
        if self.skipped_nodes:
            warnings.warn(f"skipped {len(self.skipped_nodes)} quadrature nodes "
                          "with v == V (no relative motion)", stacklevel=2)
        vv, VV, ww = vv[live], VV[live], ww[live]
        self.v_nodes, self.V_nodes, self.weights = vv, VV, ww

        kcm = (params.m * vv + params.M * VV) / params.hbar
        krel = params.mu * (vv - VV) / params.hbar
        self.table: BranchTable = _barrier_table(kcm, krel, ww.astype(complex),
                                                 params, pe_time_phase)


class WellWavegroup(WaveSource):
    """Well-velocity quadrature and Gaussian mode sum of well eigenstates.

    The mode-sum phases align at the left wall: at t = 0 the relative packet
    sits at x_rel = -D and moves toward +D at the mode-n relative velocity.
    """

    def __init__(self, cfg: WellWavegroupConfig, params: SystemParams):
        if not params.infinite_well:
            raise ValueError("params must be flagged infinite_well")
        self.cfg = cfg
        self.params = params
        modes = cfg.modes()
        if modes.size == 0:
            raise ValueError("no modes remain above the weight floor")
        V_nodes, wV = _trapezoid_nodes(cfg.V0, cfg.dV, cfg.span, cfg.n_V)
        gV = np.exp(-((V_nodes - cfg.V0) ** 2) / (2 * cfg.dV ** 2)) / np.sqrt(cfg.dV)
        wn = cfg.mode_weights(modes)

        # n-major ascending; V ascending within each mode
        nn = np.repeat(modes, V_nodes.size)
        VV = np.tile(V_nodes, modes.size)
        ww = (wn[:, None] * (wV * gV)[None, :]).ravel()
        vv = np.array([well_mode_velocity(int(n), V, params)
                       for n, V in zip(nn, VV)])
        self.modes, self.V_nodes, self.v_nodes, self.weights = nn, VV, vv, ww

        kcm = (params.m * vv + params.M * VV) / params.hbar
        krel = params.mu * (vv - VV) / params.hbar
        self.table: BranchTable = _well_table(kcm, krel, ww.astype(complex),
                                              params)
