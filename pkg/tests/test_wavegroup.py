import numpy as np
import pytest

from twotime.branches import BranchTable, WaveSource
from twotime.eigen import BarrierEigenstate, WellEigenstate
from twotime.field import GridSpec, snapshot
from twotime.system import SystemParams, VelocityPair
from twotime.wavegroup import (BarrierWavegroup, BarrierWavegroupConfig,
                               WellWavegroup, WellWavegroupConfig)


def test_config_validation():
    with pytest.raises(ValueError):
        BarrierWavegroupConfig(v0=1.0, dv=0.0, V0=0.0, dV=0.1)
    with pytest.raises(ValueError):
        BarrierWavegroupConfig(v0=1.0, dv=0.1, V0=0.0, dV=0.1, n_v=1)
    with pytest.raises(ValueError):
        BarrierWavegroupConfig(v0=1.0, dv=0.1, V0=0.0, dV=0.1, span=0.0)
    with pytest.raises(ValueError):
        WellWavegroupConfig(n0=5.0, dx=-0.1, V0=1.0, dV=0.1)
    with pytest.raises(ValueError):
        WellWavegroupConfig(n0=5.0, dx=0.1, V0=1.0, dV=0.1, n_range=(0, 3))


def test_mode_truncation_weight_floor():
    cfg = WellWavegroupConfig(n0=50.0, dx=1.0 / 15.0, V0=10.0, dV=1.0 / 3.0)
    modes = cfg.modes()
    assert modes.min() >= 1
    assert np.all(cfg.mode_weights(modes) >= 1e-8)
    assert cfg.mode_weights(np.array([modes.min() - 1]))[0] < 1e-8
    assert cfg.mode_weights(np.array([modes.max() + 1]))[0] < 1e-8


def test_degenerate_limit_matches_eigenstate(well_system):
    cfg = BarrierWavegroupConfig(v0=6.0, dv=1e-14, V0=1.0, dV=1e-14,
                                 n_v=2, n_V=2)
    wg = BarrierWavegroup(cfg, well_system)
    eig = BarrierEigenstate(VelocityPair(6.0, 1.0), well_system)
    rng = np.random.default_rng(1)
    x1, x2, t1, t2 = rng.uniform(-3, 3, (4, 20))
    ratio = wg.amplitude(x1, x2, t1, t2) / eig.amplitude(x1, x2, t1, t2)
    assert np.max(np.abs(ratio / ratio[0] - 1)) < 1e-12


def test_degenerate_well_limit(infinite_system):
    cfg = WellWavegroupConfig(n0=7.0, dx=2.0, V0=0.5, dV=1e-14, n_V=2,
                              n_range=(7, 7))
    wg = WellWavegroup(cfg, infinite_system)
    eig = WellEigenstate(7, 0.5, infinite_system)
    rng = np.random.default_rng(2)
    x2 = rng.uniform(-2, 2, 20)
    xr = rng.uniform(-0.95, 0.95, 20)
    t1, t2 = rng.uniform(-0.3, 0.3, (2, 20))
    ratio = wg.amplitude(x2 + xr, x2, t1, t2) / eig.amplitude(x2 + xr, x2, t1, t2)
    assert np.max(np.abs(ratio / ratio[0] - 1)) < 1e-12


def test_linearity_of_superposition(infinite_system):
    base = dict(n0=10.0, dx=0.05, V0=10.0, dV=0.3, n_V=12)
    wg_a = WellWavegroup(WellWavegroupConfig(**base, n_range=(8, 9)),
                        infinite_system)
    wg_b = WellWavegroup(WellWavegroupConfig(**base, n_range=(11, 13)),
                        infinite_system)

    combined = object.__new__(WellWavegroup)
    combined.params = infinite_system
    combined.table = BranchTable.concatenate([wg_a.table, wg_b.table])

    rng = np.random.default_rng(3)
    x2 = rng.uniform(-2, 2, 20)
    xr = rng.uniform(-0.95, 0.95, 20)
    t1, t2 = rng.uniform(-0.2, 0.2, (2, 20))
    got = combined.amplitude(x2 + xr, x2, t1, t2)
    want = wg_a.amplitude(x2 + xr, x2, t1, t2) + wg_b.amplitude(x2 + xr, x2, t1, t2)
    assert np.abs(got - want).max() <= 1e-12 * np.abs(want).max()


def test_well_wavegroup_support(infinite_system):
    cfg = WellWavegroupConfig(n0=20.0, dx=1.0 / 15.0, V0=10.0, dV=1.0 / 3.0,
                              n_V=16)
    wg = WellWavegroup(cfg, infinite_system)
    rng = np.random.default_rng(4)
    for _ in range(30):
        x2 = rng.uniform(-2, 2)
        t1, t2 = rng.uniform(-0.1, 0.1, 2)
        for xr in (-1.0, 1.0, 1.5, -2.0):
            assert wg.amplitude(x2 + xr, x2, t1, t2) == 0.0


def test_skipped_zero_relative_nodes():
    p = SystemParams(m=1.0, M=5.0, pe=1.0, D=1.0)
    cfg = BarrierWavegroupConfig(v0=1.0, dv=0.5, V0=1.0, dV=0.5, n_v=5, n_V=5)
    with pytest.warns(UserWarning, match="skipped"):
        wg = BarrierWavegroup(cfg, p)
    assert len(wg.skipped_nodes) > 0
    assert len(wg.table) == (25 - len(wg.skipped_nodes)) * 5
    # remaining nodes still evaluate finitely
    assert np.isfinite(wg.amplitude(0.3, 0.1, 0.0, 0.0))


def test_group_motion_before_contact(well_system):
    cfg = BarrierWavegroupConfig(v0=6.0, dv=0.375, V0=1.0, dV=0.25,
                                 n_v=32, n_V=32)
    wg = BarrierWavegroup(cfg, well_system)
    cents = []
    for t in (-3.0, -2.5):
        g = GridSpec(x1=(6 * t - 11, 6 * t + 11), x2=(t - 5, t + 5),
                     n1=101, n2=101, t1=t, t2=t)
        fg = snapshot(wg, g)
        w = fg.values.sum()
        cents.append(((fg.values.sum(axis=1) * fg.row_coords).sum() / w,
                      (fg.values.sum(axis=0) * fg.col_coords).sum() / w))
    v1 = (cents[1][0] - cents[0][0]) / 0.5
    v2 = (cents[1][1] - cents[0][1]) / 0.5
    assert abs(v1 - 6.0) <= 0.02 * 6.0
    assert abs(v2 - 1.0) <= 0.02 * 1.0


def test_quadrature_convergence(well_system):
    rng = np.random.default_rng(5)
    x1 = rng.uniform(-4, 4, 50)
    x2 = rng.uniform(-2, 2, 50)

    def pdf_at(n):
        cfg = BarrierWavegroupConfig(v0=6.0, dv=0.375, V0=1.0, dV=0.25,
                                     n_v=n, n_V=n)
        wg = BarrierWavegroup(cfg, well_system)
        a = wg.amplitude(x1, x2, 0.0, 0.0)
        return a.real ** 2 + a.imag ** 2

    coarse, fine = pdf_at(32), pdf_at(64)
    rel = np.abs(fine - coarse).max() / fine.max()
    assert rel < 0.005


def test_wrong_system_pairings(infinite_system, barrier_system):
    with pytest.raises(ValueError):
        BarrierWavegroup(BarrierWavegroupConfig(v0=1, dv=0.1, V0=0, dV=0.1),
                         infinite_system)
    with pytest.raises(ValueError):
        WellWavegroup(WellWavegroupConfig(n0=5, dx=0.1, V0=1, dV=0.1),
                      barrier_system)
