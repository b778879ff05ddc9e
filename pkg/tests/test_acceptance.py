"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines as they
complete. Tolerances are pinned here, not configurable.
"""

import json
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest

from twotime.analysis import (classical_recoil, coherence_length,
                              find_peaks_1d, fringe_spacing,
                              two_surface_oscillation_period, type2_visibility)
from twotime.cli import build_source, main
from twotime.config import preset
from twotime.eigen import BarrierEigenstate, WellEigenstate, solve_coefficients
from twotime.field import (GridSpec, asynchronous_slice, conservation_grid,
                           pde_residual, segment_residual, snapshot,
                           snapshot_series)
from twotime.system import SystemParams, VelocityPair, channel_wavevectors
from twotime.wavegroup import (BarrierWavegroup, BarrierWavegroupConfig,
                               WellWavegroup, WellWavegroupConfig)


@contextmanager
def criterion(num: int, label: str):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {num:02d} FAIL: {label}")
        raise
    print(f"ACCEPTANCE {num:02d} PASS: {label}")


def test_criterion_01_scattering_unitarity():
    with criterion(1, "scattering unitarity over 1000 random channels"):
        rng = np.random.default_rng(101)
        t0 = time.perf_counter()
        # open channels: E_rel > PE > 0
        for _ in range(10):
            m, M = rng.uniform(0.3, 8.0, 2)
            pe = rng.uniform(0.05, 5.0)
            p = SystemParams(m=m, M=M, pe=pe, D=rng.uniform(0.2, 1.5))
            e = pe * rng.uniform(1.01, 10.0, 100)
            B, F, G, H, K1, K2 = solve_coefficients(e, p)[:6]
            defect = K1 * (1 - np.abs(B) ** 2) - K1 * np.abs(H) ** 2
            assert np.all(np.abs(defect) <= 1e-10 * K1)
        # evanescent channels, opaque regime: total reflection
        for _ in range(10):
            m, M = rng.uniform(0.3, 8.0, 2)
            p_tmp = SystemParams(m=m, M=M, pe=1.0, D=1.0)
            mu = p_tmp.mu
            pe = rng.uniform(0.5, 5.0)
            e = pe * rng.uniform(0.05, 0.5, 100)
            kappa = np.sqrt(2 * mu * (pe - e))
            # kappa * 2D >= 14.4 for every channel, while the most opaque
            # one stays within the conditioning limit of the 4x4 match
            D = 7.2 / kappa.min()
            p = SystemParams(m=m, M=M, pe=pe, D=D)
            B = solve_coefficients(e, p)[0]
            assert np.all(np.abs(np.abs(B) - 1) <= 1e-10)
            assert np.all(np.abs(B) <= 1 + 1e-12)
        elapsed = time.perf_counter() - t0
        assert elapsed < 1.0, f"took {elapsed:.2f}s, budget 1s"


def test_criterion_02_pe_to_zero_identity():
    with criterion(2, "PE -> 0 gives identity scattering across a velocity sweep"):
        p = SystemParams(m=1.0, M=5.0, pe=0.0, D=1.0)
        for v in np.linspace(1.2, 9.0, 25):
            ch = channel_wavevectors(VelocityPair(v, 1.0), p)
            if ch.E_rel == 0:
                continue
            B, F, G, H = solve_coefficients(np.array([ch.E_rel]), p)[:4]
            assert abs(B) < 1e-12 and abs(G) < 1e-12
            assert abs(F - 1) < 1e-12 and abs(H - 1) < 1e-12


def test_criterion_03_eigenstate_pde_residual():
    with criterion(3, "two-time equation residual < 1e-5 per region, O(h^2)"):
        rng = np.random.default_rng(103)
        p = SystemParams(m=1.0, M=5.0, pe=2.0, D=1.0)
        st = BarrierEigenstate(VelocityPair(6.0, 1.0), p)
        h = 4e-3 / st.frequency_scale()
        for lo, hi in [(-4.0, -1.1), (-0.9, 0.9), (1.1, 4.0)]:
            xr = rng.uniform(lo, hi, 100)
            x2 = rng.uniform(-3, 3, 100)
            t1, t2 = rng.uniform(-0.5, 0.5, (2, 100))
            res, scale = pde_residual(st, x2 + xr, x2, t1, t2, h)
            assert np.all(np.abs(res) <= 1e-5 * scale)
        pw = SystemParams(m=1.0, M=10.0, D=1.0, infinite_well=True)
        w = WellEigenstate(3, 0.5, pw)
        hw = 4e-3 / w.frequency_scale()
        xr = rng.uniform(-0.95, 0.95, 100)
        x2 = rng.uniform(-2, 2, 100)
        t1, t2 = rng.uniform(-0.5, 0.5, (2, 100))
        res, scale = pde_residual(w, x2 + xr, x2, t1, t2, hw)
        assert np.all(np.abs(res) <= 1e-5 * scale)
        # O(h^2) scaling of the residual
        xr = rng.uniform(-0.9, 0.9, 20)
        x2 = rng.uniform(-2, 2, 20)
        t1, t2 = rng.uniform(-0.3, 0.3, (2, 20))
        hs = np.array([4e-3, 2e-3, 1e-3, 5e-4])
        means = [np.mean(np.abs(pde_residual(st, x2 + xr, x2, t1, t2, hh)[0]))
                 for hh in hs]
        slope = np.polyfit(np.log(hs), np.log(means), 1)[0]
        assert 1.8 <= slope <= 2.2, f"slope {slope:.3f}"


def test_criterion_04_well_mode_quantization():
    with criterion(4, "mode quantization round-trips K_rel = n pi / 2D"):
        from twotime.eigen import well_mode_velocity
        p = SystemParams(m=1.0, M=10.0, D=0.7, infinite_well=True)
        for n in range(1, 201):
            v = well_mode_velocity(n, 3.0, p)
            ch = channel_wavevectors(VelocityPair(v, 3.0), p)
            want = n * np.pi / (2 * p.D)
            assert abs(ch.K_rel - want) <= 1e-12 * want


def test_criterion_05_local_conservation_fig1():
    with criterion(5, "fig1 conservation: grid residual < 1e-3, segments < 1e-3, "
                      "runtime < 2 min"):
        t0 = time.perf_counter()
        cfg = preset("fig1")
        wg = build_source(cfg)
        for t in cfg.times:
            g = GridSpec(x1=cfg.grid.x1, x2=cfg.grid.x2, n1=200, n2=200,
                         t1=t, t2=t)
            _, summary = conservation_grid(wg, g)
            assert summary["max_rel_residual"] < 1e-3, \
                f"t={t}: {summary['max_rel_residual']:.2e}"
        rng = np.random.default_rng(105)
        for _ in range(5):
            a = rng.uniform(-7, -2)
            b = a + rng.uniform(2, 5)
            res, scale = segment_residual(wg, "x1", a, b,
                                          x_other=rng.uniform(-1, 1),
                                          t1=0.0, t2=0.0, n=401)
            assert abs(res) <= 1e-3 * scale
        for _ in range(5):
            a = rng.uniform(-2, 0)
            b = a + rng.uniform(1.5, 3)
            res, scale = segment_residual(wg, "x2", a, b,
                                          x_other=rng.uniform(-3, 1),
                                          t1=0.0, t2=0.0, n=401)
            assert abs(res) <= 1e-3 * scale
        elapsed = time.perf_counter() - t0
        assert elapsed < 120.0, f"took {elapsed:.1f}s, budget 120s"


def test_criterion_06_type1_fringe_half_de_broglie():
    with criterion(6, "type I fringes at half the particle de Broglie wavelength"):
        m, M = 1.0, 100.0
        v0 = 2.0
        p_tmp = SystemParams(m=m, M=M, pe=1.0, D=0.5)
        ke = 0.5 * p_tmp.mu * v0 ** 2
        p = SystemParams(m=m, M=M, pe=2.0 * ke, D=0.5)
        cfg = BarrierWavegroupConfig(v0=v0, dv=0.1, V0=0.0, dV=0.01,
                                     n_v=48, n_V=24)
        wg = BarrierWavegroup(cfg, p)
        g = GridSpec(x1=(-10.0, 1.0), x2=(-1.5, 1.5), n1=400, n2=60,
                     t1=0.0, t2=0.0)
        fg = snapshot(wg, g)
        rep = fringe_spacing(fg, axis="x1", window=(-8.0, -0.8))
        lam_half = np.pi * p.hbar / (m * v0)
        assert rep.count >= 3
        assert abs(rep.mean_spacing - lam_half) <= 0.05 * lam_half, \
            f"spacing {rep.mean_spacing:.4f} vs lambda/2 {lam_half:.4f}"


def test_criterion_07_asynchronous_splitting():
    with criterion(7, "asynchronous slices split into free-flight and recoil peaks"):
        results = {}
        for name in ("fig4a", "fig4b"):
            cfg = preset(name)
            wg = build_source(cfg)
            sl = asynchronous_slice(wg, cfg.x1_fixed, cfg.t1_fixed, cfg.grid)
            dx2 = sl.col_coords[1] - sl.col_coords[0]
            v_out, V_out = classical_recoil(
                VelocityPair(cfg.wavegroup.v0, cfg.wavegroup.V0), cfg.system)
            t_c = -cfg.system.D / (cfg.wavegroup.v0 - cfg.wavegroup.V0)
            rec = {}
            for t2_want in (4.0, 5.0):
                r = int(np.argmin(np.abs(sl.row_coords - t2_want)))
                t2 = sl.row_coords[r]
                peaks = find_peaks_1d(sl.values[r], sl.col_coords,
                                      threshold=0.15, min_separation=3)
                assert len(peaks) == 2, f"{name} t2={t2}: {len(peaks)} peaks"
                larger, smaller = peaks[0], peaks[1]
                assert larger.height > smaller.height
                free_want = cfg.wavegroup.V0 * t2
                recoil_want = cfg.wavegroup.V0 * t_c + V_out * (t2 - t_c)
                assert abs(larger.location[0] - free_want) <= 2 * dx2
                assert abs(smaller.location[0] - recoil_want) <= 2 * dx2
                rec[t2_want] = (larger.location[0], smaller.location[0])
            results[name] = rec
        for t2_want in (4.0, 5.0):
            free_a, rec_a = results["fig4a"][t2_want]
            free_b, rec_b = results["fig4b"][t2_want]
            dx2 = 19.0 / 190  # preset slice grid spacing
            assert abs(free_a - free_b) <= dx2, "free peak moved between presets"
            assert rec_b > rec_a, "faster preset should shift the recoil peak forward"


def test_criterion_08_slice_matches_snapshot_bitwise():
    with criterion(8, "asynchronous slice at t2 = t1 equals the snapshot row "
                      "bit-exactly"):
        p = SystemParams(m=1.0, M=5.0, pe=-26.041666666666668, D=0.9)
        cfg = BarrierWavegroupConfig(v0=6.0, dv=0.375, V0=1.0, dV=0.25,
                                     n_v=16, n_V=16)
        wg = BarrierWavegroup(cfg, p)
        for x1_fix, t_fix in ((-2.0, 0.0), (0.7, 0.4)):
            gs = GridSpec(x1=(0, 1), x2=(-3, 3), n1=2, n2=61,
                          t2=(t_fix, t_fix + 1.0, 4))
            sl = asynchronous_slice(wg, x1_fix, t_fix, gs)
            sn = snapshot(wg, GridSpec(x1=(x1_fix, x1_fix + 1), x2=(-3, 3),
                                       n1=2, n2=61, t1=t_fix, t2=t_fix))
            assert np.array_equal(sl.values[0], sn.values[0])
        pw = SystemParams(m=1.0, M=10.0, D=1.0, infinite_well=True)
        ww = WellWavegroup(WellWavegroupConfig(n0=10.0, dx=1.0 / 15.0,
                                               V0=10.0, dV=1.0 / 3.0, n_V=16),
                           pw)
        gs = GridSpec(x1=(0, 1), x2=(-2, 2), n1=2, n2=41, t2=(0.2, 1.2, 3))
        sl = asynchronous_slice(ww, 0.5, 0.2, gs)
        sn = snapshot(ww, GridSpec(x1=(0.5, 1.5), x2=(-2, 2), n1=2, n2=41,
                                   t1=0.2, t2=0.2))
        assert np.array_equal(sl.values[0], sn.values[0])


def test_criterion_09_type2_oscillation():
    with criterion(9, "reflected-peak height oscillates in D at the two-surface "
                      "period"):
        mu = 5.0 / 6.0
        p = SystemParams(m=1.0, M=5.0, pe=-2.5 * (0.5 * mu * 25.0), D=0.7)
        cfg = BarrierWavegroupConfig(v0=6.0, dv=0.15, V0=1.0, dV=0.1,
                                     n_v=24, n_V=24)
        period = two_surface_oscillation_period(VelocityPair(6.0, 1.0), p)
        d_vals = np.linspace(0.48, 0.48 + 2.35 * period, 40)
        heights = np.array([h for _, h in type2_visibility(cfg, p, d_vals)])
        maxima = find_peaks_1d(heights, d_vals, threshold=0.3, min_separation=2)
        assert len(maxima) >= 2, "need at least two interior maxima"
        pos = sorted(q.location[0] for q in maxima)
        gaps = np.diff(pos)
        assert np.all(np.abs(gaps - period) <= 0.10 * period), \
            f"gaps {gaps} vs period {period:.4f}"
        interior = heights[1:-1]
        assert interior.max() > heights[[0, -1]].min() and \
            (np.diff(np.sign(np.diff(heights))) != 0).sum() >= 2, \
            "needs interior maximum and minimum"


def test_criterion_10_threaded_determinism(tmp_path):
    with criterion(10, "fig1 CSV output byte-identical across thread counts"):
        outs = {}
        for threads in (1, 4):
            out = tmp_path / f"t{threads}" / "fig1"
            rc = main(["snapshot", "--preset", "fig1", "--out", str(out),
                       "--threads", str(threads)])
            assert rc == 0
            outs[threads] = sorted(out.parent.glob("*.csv"))
        for a, b in zip(outs[1], outs[4]):
            assert a.name == b.name
            assert a.read_bytes() == b.read_bytes(), f"{a.name} differs"


def test_criterion_11_coherence_length_worked_values():
    with criterion(11, "coherence length reproduces the worked estimates"):
        assert coherence_length(5000.0, 2.0, 1.0) == pytest.approx(10000.0,
                                                                   rel=1e-12)
        assert coherence_length(1.4, 790.0 / 1.4, 1.0) == pytest.approx(
            790.0, rel=1e-12)
