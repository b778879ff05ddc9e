import numpy as np
import pytest

from twotime.eigen import BarrierEigenstate, WellEigenstate
from twotime.errors import StepTooCoarse
from twotime.field import (FieldGrid, GridSpec, asynchronous_slice,
                           conservation_grid, conservation_residual,
                           current_snapshot, currents, joint_pdf,
                           segment_residual, snapshot, snapshot_series)
from twotime.system import SystemParams, VelocityPair
from twotime.wavegroup import (BarrierWavegroup, BarrierWavegroupConfig,
                               WellWavegroup, WellWavegroupConfig)


@pytest.fixture(scope="module")
def wavegroup():
    p = SystemParams(m=1.0, M=5.0, pe=-26.041666666666668, D=0.9)
    cfg = BarrierWavegroupConfig(v0=6.0, dv=0.375, V0=1.0, dV=0.25,
                                 n_v=24, n_V=24)
    return BarrierWavegroup(cfg, p)


def test_gridspec_validation():
    with pytest.raises(ValueError):
        GridSpec(x1=(1.0, 1.0), x2=(0.0, 1.0), n1=10, n2=10)
    with pytest.raises(ValueError):
        GridSpec(x1=(0.0, 1.0), x2=(0.0, 1.0), n1=1, n2=10)
    g = GridSpec(x1=(0.0, 1.0), x2=(0.0, 2.0), n1=3, n2=5, t2=(0.0, 1.0, 4))
    assert g.t2_axis().size == 4


def test_fieldgrid_validation():
    ax = np.linspace(0, 1, 3)
    with pytest.raises(ValueError):
        FieldGrid(values=np.array([[1.0, -2.0, 1.0]] * 3), row_name="x1",
                  row_coords=ax, col_name="x2", col_coords=ax, kind="pdf")
    with pytest.raises(ValueError):
        FieldGrid(values=np.full((3, 3), np.nan), row_name="x1",
                  row_coords=ax, col_name="x2", col_coords=ax, kind="residual")
    fg = FieldGrid(values=np.array([[0.0, 2.0, 4.0]] * 3), row_name="x1",
                   row_coords=ax, col_name="x2", col_coords=ax)
    assert fg.normalized("max1").values.max() == 1.0


def test_free_plane_wave_pdf_constant():
    p = SystemParams(m=1.0, M=5.0, pe=0.0, D=1.0)
    st = BarrierEigenstate(VelocityPair(6.0, 1.0), p)
    rng = np.random.default_rng(0)
    x1, x2, t1, t2 = rng.uniform(-5, 5, (4, 50))
    pdf = joint_pdf(st, x1, x2, t1, t2)
    assert np.abs(pdf - 1.0).max() < 1e-12


def test_well_pdf_boundary_and_node(infinite_system):
    w = WellEigenstate(2, 0.5, infinite_system)
    assert joint_pdf(w, 1.3, 0.3, 0.2, 0.4) == 0.0    # x_rel = +D
    # the n=2 interior node is a property of the synchronous state; at
    # t1 != t2 the two branches dephase and the node fills in
    assert joint_pdf(w, 0.3, 0.3, 0.4, 0.4) < 1e-28
    assert joint_pdf(w, 0.3, 0.3, 0.2, 0.4) > 1e-3


def test_plane_wave_currents():
    p = SystemParams(m=1.0, M=5.0, pe=0.0, D=1.0)
    st = BarrierEigenstate(VelocityPair(6.0, 1.0), p)
    k, K = VelocityPair(6.0, 1.0).wavevectors(p)
    j1, j2 = currents(st, 0.7, -0.3, 0.1, 0.2)
    pdf = joint_pdf(st, 0.7, -0.3, 0.1, 0.2)
    assert j1 == pytest.approx(k / p.m * pdf, rel=1e-12)
    assert j2 == pytest.approx(K / p.M * pdf, rel=1e-12)


def test_standing_wave_relative_current_vanishes_at_antinode(infinite_system):
    # V = 0, ground mode: counter-propagating branches balance at the antinode
    w = WellEigenstate(1, 0.0, infinite_system)
    m, M = infinite_system.m, infinite_system.M
    x_cm = 0.6
    x1 = x_cm  # x_rel = 0
    j1, j2 = currents(w, x1, x1, 0.3, 0.7)
    pdf = joint_pdf(w, x1, x1, 0.3, 0.7)
    v_rel_density = j1 / 1.0 - j2 / 1.0  # j1/pdf - j2/pdf ~ velocity difference
    assert abs(j1 / pdf - j2 / pdf) < 1e-10  # both move with the cm only


def test_analytic_vs_fd_currents(wavegroup):
    rng = np.random.default_rng(7)
    x1, x2 = rng.uniform(-3, 3, (2, 30))
    j1a, j2a = currents(wavegroup, x1, x2, 0.1, -0.2)
    j1f, j2f = currents(wavegroup, x1, x2, 0.1, -0.2, method="fd")
    scale = max(np.abs(j1a).max(), np.abs(j2a).max())
    assert np.abs(j1f - j1a).max() <= 1e-3 * scale
    assert np.abs(j2f - j2a).max() <= 1e-3 * scale


def test_fd_currents_step_too_coarse(wavegroup):
    with pytest.raises(StepTooCoarse):
        currents(wavegroup, 0.5, 0.1, 0.0, 0.0, method="fd", h=0.8)


def test_plane_wave_conservation_exact():
    p = SystemParams(m=1.0, M=5.0, pe=0.0, D=1.0)
    st = BarrierEigenstate(VelocityPair(6.0, 1.0), p)
    res, scale = conservation_residual(st, 0.4, -0.2, 0.1, 0.3)
    assert abs(res) < 1e-10


def test_conservation_random_points(wavegroup):
    rng = np.random.default_rng(8)
    D = wavegroup.params.D
    h = 1.5e-4
    for lo, hi in [(-6, -D - 0.05), (-D + 0.05, D - 0.05), (D + 0.05, 6)]:
        xr = rng.uniform(lo, hi, 100)
        x2 = rng.uniform(-2, 2, 100)
        res, scale = conservation_residual(wavegroup, x2 + xr, x2, 0.0, 0.0,
                                           h=h)
        live = scale > 1e-9 * scale.max()
        assert np.all(np.abs(res[live]) <= 1e-4 * scale[live])


def test_conservation_residual_second_order(wavegroup):
    g = GridSpec(x1=(-6, 6), x2=(-3, 3), n1=40, n2=40, t1=0.0, t2=0.0)
    hs = np.array([2e-3, 1e-3, 5e-4, 2.5e-4])
    maxima = [conservation_grid(wavegroup, g, h=h)[1]["max_rel_residual"]
              for h in hs]
    slope = np.polyfit(np.log(hs), np.log(maxima), 1)[0]
    assert 1.8 <= slope <= 2.2


def test_segment_conservation(wavegroup):
    rng = np.random.default_rng(9)
    for _ in range(5):
        a = rng.uniform(-6, -2)
        b = a + rng.uniform(2, 5)
        res, scale = segment_residual(wavegroup, "x1", a, b,
                                      x_other=rng.uniform(-1, 1),
                                      t1=0.0, t2=0.0, n=401)
        assert abs(res) <= 1e-3 * scale
    for _ in range(5):
        a = rng.uniform(-2, 0)
        b = a + rng.uniform(1.5, 3)
        res, scale = segment_residual(wavegroup, "x2", a, b,
                                      x_other=rng.uniform(-3, 1),
                                      t1=0.0, t2=0.0, n=401)
        assert abs(res) <= 1e-3 * scale


def test_snapshot_requires_synchronous_times(wavegroup):
    g = GridSpec(x1=(-1, 1), x2=(-1, 1), n1=4, n2=4, t1=0.0, t2=0.5)
    with pytest.raises(ValueError):
        snapshot(wavegroup, g)


def test_snapshot_matches_pointwise(wavegroup):
    g = GridSpec(x1=(-3, 3), x2=(-2, 2), n1=21, n2=23, t1=0.4, t2=0.4)
    fg = snapshot(wavegroup, g)
    X1 = fg.row_coords[:, None] + 0 * fg.col_coords[None, :]
    X2 = 0 * fg.row_coords[:, None] + fg.col_coords[None, :]
    want = joint_pdf(wavegroup, X1, X2, 0.4, 0.4)
    np.testing.assert_allclose(fg.values, want, rtol=1e-10, atol=1e-14)
    assert np.all(fg.values >= 0)


def test_snapshot_thread_determinism(wavegroup):
    g = GridSpec(x1=(-4, 4), x2=(-2, 2), n1=40, n2=40, t1=0.0, t2=0.0)
    a = snapshot(wavegroup, g, threads=1)
    b = snapshot(wavegroup, g, threads=4)
    assert np.array_equal(a.values, b.values)


def test_slice_row_equals_snapshot_row_bitwise(wavegroup):
    x1_fix, t_fix = -2.0, 0.5
    g_slice = GridSpec(x1=(0, 1), x2=(-2, 2), n1=2, n2=37,
                       t2=(t_fix, t_fix + 1.0, 3))
    sl = asynchronous_slice(wavegroup, x1_fix, t_fix, g_slice)
    g_snap = GridSpec(x1=(x1_fix, x1_fix + 1), x2=(-2, 2), n1=2, n2=37,
                      t1=t_fix, t2=t_fix)
    sn = snapshot(wavegroup, g_snap)
    assert np.array_equal(sl.values[0], sn.values[0])


def test_current_snapshot_matches_pointwise(wavegroup):
    g = GridSpec(x1=(-3, 3), x2=(-2, 2), n1=11, n2=13, t1=0.2, t2=0.2)
    for which, idx in (("j1", 0), ("j2", 1)):
        fg = current_snapshot(wavegroup, g, which)
        X1 = fg.row_coords[:, None] + 0 * fg.col_coords[None, :]
        X2 = 0 * fg.row_coords[:, None] + fg.col_coords[None, :]
        want = currents(wavegroup, X1, X2, 0.2, 0.2)[idx]
        np.testing.assert_allclose(fg.values, want, rtol=1e-9, atol=1e-12)


def test_snapshot_series_shares_tables(wavegroup):
    g = GridSpec(x1=(-3, 3), x2=(-2, 2), n1=11, n2=11, t1=0.0, t2=0.0)
    series = snapshot_series(wavegroup, g, [-1.0, 0.0])
    lone = snapshot(wavegroup, GridSpec(x1=(-3, 3), x2=(-2, 2), n1=11, n2=11,
                                        t1=-1.0, t2=-1.0))
    assert np.array_equal(series[0].values, lone.values)
    assert series[0].meta["t"] == -1.0 and series[1].meta["t"] == 0.0


def test_well_wavegroup_snapshot_support(infinite_system):
    cfg = WellWavegroupConfig(n0=10.0, dx=1.0 / 15.0, V0=10.0, dV=1.0 / 3.0,
                              n_V=16)
    wg = WellWavegroup(cfg, infinite_system)
    g = GridSpec(x1=(-2, 2), x2=(-2, 2), n1=41, n2=41, t1=0.0, t2=0.0)
    fg = snapshot(wg, g)
    X1 = fg.row_coords[:, None] + 0 * fg.col_coords[None, :]
    X2 = 0 * fg.row_coords[:, None] + fg.col_coords[None, :]
    assert np.all(fg.values[np.abs(X1 - X2) >= infinite_system.D] == 0.0)
