"""Exact two-body, two-time energy eigenstates.

Infinite-well bound states, three-region barrier/finite-well scattering
states, the boundary-matching coefficient system, and the per-branch
assignment of kinetic energies to the two time labels.

The temporal phase of each branch is -(KE1 t1 + KE2 t2)/hbar, with the
particle kinetic energy KE1 = (hbar k1)^2/2m read off the spatial phase
gradient along x1 (and likewise KE2 along x2). Inside the interaction
region the kinetic energies sum to E_tot - PE; the remaining potential
term is attached symmetrically as exp(-i PE (t1+t2)/(2 hbar)) so the state
solves the two-time Schroedinger equation pointwise and stays continuous
across the region edges at synchronous times. That factor is unimodular
and common to both interior branches, so the joint PDF is identical with
or without it (``pe_time_phase=False`` drops it).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .branches import (R_AFTER_N, R_AFTER_P, R_BEFORE_N, R_BEFORE_P, R_MID,
                       R_WELL, BranchTable, WaveSource, region_name)
from .errors import InvalidMode, SingularMatch, ZeroRelativeMotion
from .system import Channel, SystemParams, VelocityPair, channel_wavevectors

COND_LIMIT = 1e12


@dataclass(frozen=True)
class ScatteringCoefficients:
    """Amplitudes of one relative-energy channel, with A = 1 fixed."""

    A: complex
    B: complex
    F: complex
    G: complex
    H: complex
    K_before: float
    K_barrier: complex
    K_after: float
    condition_number: float

    def flux_defect(self) -> float:
        """K_before (|A|^2 - |B|^2) - K_after |H|^2.

        Zero for every channel: the outer regions propagate regardless of an
        evanescent interior, so the reflected plus (tunneling) transmitted
        flux always balances the incident one.
        """
        return (self.K_before * (abs(self.A) ** 2 - abs(self.B) ** 2)
                - self.K_after * abs(self.H) ** 2)


@dataclass(frozen=True)
class BranchKinematics:
    """Particle/well-or-barrier momenta and kinetic energies of one branch."""

    branch: str
    region: str
    p1: complex
    p2: complex
    ke1: complex
    ke2: complex


def well_mode_velocity(n: int, V: float, params: SystemParams) -> float:
    """Quantized particle velocity for mode n, given well velocity V.

    Equivalent to pinning the relative wavevector at n pi / (2 D).
    """
    if n < 1:
        raise InvalidMode(f"mode index must be >= 1, got {n}")
    return V + n * math.pi * params.hbar * params.m_tot / (
        2.0 * params.D * params.m * params.M)


def solve_coefficients(e_rel, params: SystemParams):
    """Vectorized boundary matching over an array of relative energies.

    Solves the 4x4 complex system from continuity of u and u' at
    x_rel = -D and +D with A = 1. Returns (B, F, G, H, K1, K2, cond) arrays;
    K2 is on the positive-imaginary branch for E_rel < PE.
    """
    e_rel = np.asarray(e_rel, dtype=np.float64)
    if params.infinite_well:
        raise ValueError("scattering coefficients need a finite potential")
    if np.any(e_rel <= 0):
        raise ZeroRelativeMotion("relative energy must be positive")
    hbar, mu, D, pe = params.hbar, params.mu, params.D, params.pe
    K1 = np.sqrt(2.0 * mu * e_rel) / hbar
    K2 = np.sqrt(2.0 * mu * (e_rel - pe) + 0j) / hbar

    e1 = np.exp(1j * K1 * D)           # e^{+i K1 D}
    e2p = np.exp(1j * K2 * D)          # e^{+i K2 D}
    e2m = np.exp(-1j * K2 * D)
    zero = np.zeros_like(e1, dtype=np.complex128)

    # unknowns [B, F, G, H]
    A = np.stack([
        np.stack([e1, -e2m, -e2p, zero], axis=-1),
        np.stack([-K1 * e1, -K2 * e2m, K2 * e2p, zero], axis=-1),
        np.stack([zero, e2p, e2m, -e1], axis=-1),
        np.stack([zero, K2 * e2p, -K2 * e2m, -K1 * e1], axis=-1),
    ], axis=-2)
    rhs = np.stack([-1.0 / e1, -K1 / e1, zero, zero], axis=-1)

    cond = np.linalg.cond(A)
    bad = ~np.isfinite(cond) | (cond > COND_LIMIT)
    if np.any(bad):
        worst = float(np.nanmax(np.where(np.isfinite(cond), cond, np.inf)))
        raise SingularMatch(
            f"boundary matching ill-conditioned (cond={worst:.3e} > {COND_LIMIT:.0e})")
    sol = np.linalg.solve(A, rhs[..., None])[..., 0]
    B, F, G, H = (sol[..., i] for i in range(4))
    return B, F, G, H, K1, K2, cond


def barrier_coefficients(vp: VelocityPair, params: SystemParams) -> ScatteringCoefficients:
    """Scattering amplitudes for the channel defined by one velocity pair."""
    ch = channel_wavevectors(vp, params)
    if ch.E_rel == 0.0:
        raise ZeroRelativeMotion("v == V gives a channel with E_rel = 0")
    B, F, G, H, K1, K2, cond = solve_coefficients(ch.E_rel, params)
    return ScatteringCoefficients(
        A=1.0 + 0j, B=complex(B), F=complex(F), G=complex(G), H=complex(H),
        K_before=float(K1), K_barrier=complex(K2), K_after=float(K1),
        condition_number=float(cond))


class BarrierEigenstate(WaveSource):
    """Two-time scattering eigenstate of the barrier or finite well.

    Five branches: incident A and reflected B upstream, F and G inside the
    interaction region, transmitted H downstream. Channels with v < V are
    mirrored so incidence always runs along increasing relative coordinate.
    """

    def __init__(self, vp: VelocityPair, params: SystemParams, *,
                 pe_time_phase: bool = True):
        if params.infinite_well:
            raise ValueError("use WellEigenstate for the infinite well")
        self.vp = vp
        self.params = params
        self.pe_time_phase = pe_time_phase
        self.channel: Channel = channel_wavevectors(vp, params)
        if self.channel.E_rel == 0.0:
            raise ZeroRelativeMotion("v == V gives a channel with E_rel = 0")
        self.coefficients = barrier_coefficients(vp, params)
        self.table = _barrier_table(
            np.array([self.channel.K_cm]), np.array([self.channel.K_rel]),
            np.array([1.0 + 0j]), params, pe_time_phase)

    def kinematics(self, branch: str) -> BranchKinematics:
        return _kinematics_from_table(self.table, _BARRIER_BRANCHES.index(branch),
                                      branch, self.params,
                                      pe_phase=self.pe_time_phase)


class WellEigenstate(WaveSource):
    """Two-time eigenstate of a particle bound in a moving infinite well.

    The mode-n sine splits into two counter-propagating branches, each with
    its own particle/well momenta and kinetic energies; the amplitude is
    exactly zero for |x_rel| >= D.
    """

    def __init__(self, n: int, V: float, params: SystemParams):
        if not params.infinite_well:
            raise ValueError("params must be flagged infinite_well")
        if n < 1:
            raise InvalidMode(f"mode index must be >= 1, got {n}")
        self.n = int(n)
        self.V = float(V)
        self.params = params
        self.v = well_mode_velocity(n, V, params)
        self.vp = VelocityPair(v=self.v, V=self.V)
        self.channel = channel_wavevectors(self.vp, params)
        self.table = _well_table(np.array([self.channel.K_cm]),
                                 np.array([self.channel.K_rel]),
                                 np.array([1.0 + 0j]), params)

    def kinematics(self, branch: str) -> BranchKinematics:
        return _kinematics_from_table(self.table, _WELL_BRANCHES.index(branch),
                                      branch, self.params, pe_phase=False)


_BARRIER_BRANCHES = ["incident", "reflected", "barrier_right", "barrier_left",
                     "transmitted"]
_WELL_BRANCHES = ["rightward", "leftward"]


def branch_kinematics(branch: str, vp: VelocityPair,
                      params: SystemParams) -> BranchKinematics:
    """Momenta and kinetic energies of one barrier/finite-well branch."""
    if branch not in _BARRIER_BRANCHES:
        raise ValueError(f"unknown branch {branch!r}; one of {_BARRIER_BRANCHES}")
    return BarrierEigenstate(vp, params).kinematics(branch)


def _kinematics_from_table(table: BranchTable, i: int, branch: str,
                           params: SystemParams, pe_phase: bool) -> BranchKinematics:
    k1, k2 = complex(table.k1[i]), complex(table.k2[i])
    p1 = params.hbar * k1
    p2 = params.hbar * k2
    ke1 = p1 * p1 / (2.0 * params.m)
    ke2 = p2 * p2 / (2.0 * params.M)
    return BranchKinematics(branch=branch, region=region_name(int(table.region[i])),
                            p1=p1, p2=p2, ke1=ke1, ke2=ke2)


def _barrier_table(kcm, krel, weight, params: SystemParams,
                   pe_time_phase: bool) -> BranchTable:
    """Branch table for an array of scattering channels (weights folded in).

    kcm/krel/weight are aligned 1-D arrays; each channel contributes its five
    branches consecutively (incident, reflected, F, G, transmitted).
    """
    kcm = np.asarray(kcm, dtype=np.float64)
    krel = np.asarray(krel, dtype=np.float64)
    weight = np.asarray(weight, dtype=np.complex128)
    hbar, mu = params.hbar, params.mu
    e_rel = (hbar * krel) ** 2 / (2.0 * mu)
    B, F, G, H, K1, K2 = solve_coefficients(e_rel, params)[:6]
    s = np.where(krel >= 0, 1.0, -1.0)  # incidence orientation

    n = kcm.size
    region = np.empty((n, 5), dtype=np.int8)
    region[:, 0] = np.where(s > 0, R_BEFORE_P, R_BEFORE_N)
    region[:, 1] = region[:, 0]
    region[:, 2] = R_MID
    region[:, 3] = R_MID
    region[:, 4] = np.where(s > 0, R_AFTER_P, R_AFTER_N)

    coeff = np.stack([weight, weight * B, weight * F, weight * G, weight * H],
                     axis=1)
    q = np.stack([s * K1, -s * K1, s * K2, -s * K2, s * K1], axis=1)
    kcm5 = np.repeat(kcm[:, None], 5, axis=1)
    w_extra = np.zeros((n, 5), dtype=np.complex128)
    if pe_time_phase:
        w_extra[:, 2] = params.pe / (2.0 * hbar)
        w_extra[:, 3] = params.pe / (2.0 * hbar)
    return BranchTable.build(region.ravel(), coeff.ravel(), kcm5.ravel(),
                             q.ravel(), params, w_extra=w_extra.ravel())


def _well_table(kcm, krel, weight, params: SystemParams) -> BranchTable:
    """Branch table for an array of well channels (two branches each)."""
    kcm = np.asarray(kcm, dtype=np.float64)
    krel = np.asarray(krel, dtype=np.float64)
    weight = np.asarray(weight, dtype=np.complex128)
    D = params.D
    # sin[K_rel (x_rel + D)] = sum_s (s/2i) exp(i s K_rel D) exp(i s K_rel x_rel)
    cp = weight * np.exp(1j * krel * D) / 2j
    cm = -weight * np.exp(-1j * krel * D) / 2j
    n = kcm.size
    region = np.full((n, 2), R_WELL, dtype=np.int8)
    coeff = np.stack([cp, cm], axis=1)
    q = np.stack([krel, -krel], axis=1).astype(np.complex128)
    kcm2 = np.repeat(kcm[:, None], 2, axis=1)
    return BranchTable.build(region.ravel(), coeff.ravel(), kcm2.ravel(),
                             q.ravel(), params)
