"""Physical parameters, coordinate conventions, and lab <-> cm/rel transforms.

Simulation units fix hbar = 1; masses, lengths, and velocities are
dimensionless. The interaction region spans x_rel in [-D, +D] with
x_rel = x1 - x2 (particle minus well/barrier coordinate).
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class SystemParams:
    """Masses, potential, and geometry of the particle/well-or-barrier pair.

    pe < 0 is a finite well, pe > 0 a barrier; the trapped (infinite well)
    case is selected with infinite_well=True, in which case pe is ignored.
    """

    m: float            # particle mass
    M: float            # well or barrier mass
    pe: float = 0.0     # potential energy inside |x_rel| <= D
    D: float = 1.0      # half-width of the interaction region
    hbar: float = 1.0
    infinite_well: bool = False

    def __post_init__(self):
        if not (self.m > 0 and self.M > 0 and self.D > 0 and self.hbar > 0):
            raise ValueError("m, M, D, hbar must all be positive")
        if not self.infinite_well and not math.isfinite(self.pe):
            raise ValueError("pe must be finite unless infinite_well is set")

    @property
    def m_tot(self) -> float:
        return self.m + self.M

    @property
    def mu(self) -> float:
        return self.m * self.M / (self.m + self.M)


@dataclass(frozen=True)
class LabPoint:
    """Evaluation point: particle at (x1, t1), well or barrier at (x2, t2)."""

    x1: float
    t1: float
    x2: float
    t2: float

    def as_tuple(self):
        return (self.x1, self.x2, self.t1, self.t2)


@dataclass(frozen=True)
class CmRelPoint:
    """Center-of-mass/relative coordinates with pass-through time labels."""

    x_cm: float
    x_rel: float
    t_cm: float
    t_rel: float


@dataclass(frozen=True)
class VelocityPair:
    """Initial particle and well/barrier velocities for one plane-wave channel."""

    v: float
    V: float

    def wavevectors(self, params: SystemParams):
        """Single-body wavevectors k = m v / hbar and K = M V / hbar."""
        return self.v * params.m / params.hbar, self.V * params.M / params.hbar


@dataclass(frozen=True)
class Channel:
    """Separated cm/rel kinematics of one (v, V) channel."""

    k: float
    K: float
    K_cm: float
    K_rel: float
    E_cm: float
    E_rel: float

    @property
    def E_tot(self) -> float:
        return self.E_cm + self.E_rel


def to_cm_rel(p: LabPoint, params: SystemParams) -> CmRelPoint:
    """Map lab coordinates to cm/rel; time labels pass through unmixed."""
    x_cm = (params.m * p.x1 + params.M * p.x2) / params.m_tot
    return CmRelPoint(x_cm=x_cm, x_rel=p.x1 - p.x2, t_cm=p.t1, t_rel=p.t2)


def from_cm_rel(c: CmRelPoint, params: SystemParams) -> LabPoint:
    """Inverse of to_cm_rel."""
    x1 = c.x_cm + (params.M / params.m_tot) * c.x_rel
    x2 = c.x_cm - (params.m / params.m_tot) * c.x_rel
    return LabPoint(x1=x1, t1=c.t_cm, x2=x2, t2=c.t_rel)


def channel_wavevectors(vp: VelocityPair, params: SystemParams) -> Channel:
    """Cm/rel wavevectors and energies for one velocity pair.

    K_cm = k + K and K_rel = (M k - m K) / M_tot = mu (v - V) / hbar, so the
    total kinetic energy identity (hbar K)^2/2M + (hbar k)^2/2m = E_rel + E_cm
    holds exactly.
    """
    k, K = vp.wavevectors(params)
    K_cm = k + K
    K_rel = (params.M * k - params.m * K) / params.m_tot
    E_cm = (params.hbar * K_cm) ** 2 / (2.0 * params.m_tot)
    E_rel = (params.hbar * K_rel) ** 2 / (2.0 * params.mu)
    return Channel(k=k, K=K, K_cm=K_cm, K_rel=K_rel, E_cm=E_cm, E_rel=E_rel)
