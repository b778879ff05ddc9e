"""Quantitative extractors: peaks, fringe spacing, recoil, coherence length.

These turn PDF grids into testable numbers. Peak and fringe detection work
on the raw sampled values (no spectral estimation; desk-scale windows hold
too few fringes for that), with parabolic sub-cell refinement of maxima.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy import ndimage

from .errors import DivisionByZeroWidth, TooFewFringes
from .field import FieldGrid, GridSpec, snapshot
from .system import SystemParams, VelocityPair, channel_wavevectors
from .wavegroup import BarrierWavegroup, BarrierWavegroupConfig


@dataclass(frozen=True)
class Peak:
    """One local maximum: location along the scanned axes, height, FWHM."""

    location: tuple
    height: float
    width: float


@dataclass(frozen=True)
class FringeReport:
    mean_spacing: float
    spacing_stddev: float
    count: int


def classical_recoil(vp: VelocityPair, params: SystemParams):
    """Outgoing velocities of a 1-D elastic collision (momentum and kinetic
    energy conserving)."""
    m, M = params.m, params.M
    v_out = ((m - M) * vp.v + 2 * M * vp.V) / (m + M)
    V_out = ((M - m) * vp.V + 2 * m * vp.v) / (m + M)
    return v_out, V_out


def coherence_length(wavelength: float, V: float, dV: float) -> float:
    """Longitudinal coherence length lambda * V / dV."""
    if dV == 0:
        raise DivisionByZeroWidth("velocity width dV must be nonzero")
    return wavelength * V / dV


def smoothed(grid: FieldGrid, sigma_cells: float) -> FieldGrid:
    """Optional detector-resolution blur (Gaussian, sigma in grid cells)."""
    if sigma_cells <= 0:
        return grid
    return replace(grid, values=ndimage.gaussian_filter(grid.values, sigma_cells))


def _refine_max(values: np.ndarray, coords: np.ndarray, i: int) -> float:
    """Parabolic sub-cell refinement of a local maximum position."""
    if 0 < i < values.size - 1:
        y0, y1, y2 = values[i - 1], values[i], values[i + 1]
        denom = y0 - 2 * y1 + y2
        if denom < 0:
            delta = 0.5 * (y0 - y2) / denom
            if abs(delta) <= 1:
                return float(coords[i] + delta * (coords[1] - coords[0]))
    return float(coords[i])


def _fwhm(values: np.ndarray, coords: np.ndarray, i: int) -> float:
    """Full width at half maximum around index i, clipped at the window."""
    half = 0.5 * values[i]
    lo = coords[0]
    for j in range(i - 1, -1, -1):
        if values[j] <= half:
            frac = (values[j + 1] - half) / (values[j + 1] - values[j])
            lo = coords[j + 1] + frac * (coords[j] - coords[j + 1])
            break
    hi = coords[-1]
    for j in range(i + 1, values.size):
        if values[j] <= half:
            frac = (values[j - 1] - half) / (values[j - 1] - values[j])
            hi = coords[j - 1] + frac * (coords[j] - coords[j - 1])
            break
    width = float(hi - lo)
    dx = float(coords[1] - coords[0]) if coords.size > 1 else 1.0
    return max(width, dx)


def _local_maxima_1d(values: np.ndarray) -> np.ndarray:
    v = values
    idx = np.nonzero((v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:]))[0] + 1
    return idx


def find_peaks_1d(values, coords, threshold: float = 0.15,
                  min_separation: int = 3) -> list[Peak]:
    """Local maxima above threshold * max, at least min_separation cells apart.

    Returns peaks sorted by height, highest first; may be empty.
    """
    values = np.asarray(values, dtype=np.float64)
    coords = np.asarray(coords, dtype=np.float64)
    top = float(values.max(initial=0.0))
    if top <= 0:
        return []
    cand = [i for i in _local_maxima_1d(values) if values[i] >= threshold * top]
    cand.sort(key=lambda i: values[i], reverse=True)
    kept: list[int] = []
    for i in cand:
        if all(abs(i - j) >= min_separation for j in kept):
            kept.append(i)
    return [Peak(location=(_refine_max(values, coords, i),),
                 height=float(values[i]),
                 width=_fwhm(values, coords, i)) for i in kept]


def find_peaks(grid: FieldGrid, threshold: float = 0.15,
               min_separation: int = 3, row: int | None = None) -> list[Peak]:
    """Peaks of a field grid.

    With ``row`` given, scans that single row (1-D; location is the column
    coordinate). Otherwise finds 2-D local maxima; locations are
    (column, row) coordinate pairs. Positions are invariant under
    max-normalization of the grid.
    """
    if row is not None:
        return find_peaks_1d(grid.values[row], grid.col_coords,
                             threshold, min_separation)
    v = grid.values
    top = float(v.max(initial=0.0))
    if top <= 0:
        return []
    footprint = np.ones((3, 3), dtype=bool)
    is_max = (v == ndimage.maximum_filter(v, footprint=footprint,
                                          mode="nearest")) & (v >= threshold * top)
    cand = list(zip(*np.nonzero(is_max)))
    cand.sort(key=lambda ij: v[ij], reverse=True)
    kept: list[tuple[int, int]] = []
    for ij in cand:
        if all(max(abs(ij[0] - kj[0]), abs(ij[1] - kj[1])) >= min_separation
               for kj in kept):
            kept.append(ij)
    peaks = []
    for (i, j) in kept:
        col = _refine_max(v[i], grid.col_coords, j)
        rowc = _refine_max(v[:, j], grid.row_coords, i)
        width = _fwhm(v[i], grid.col_coords, j)
        peaks.append(Peak(location=(col, rowc), height=float(v[i, j]),
                          width=width))
    return peaks


def fringe_spacing(grid: FieldGrid, axis: str, window: tuple[float, float],
                   min_count: int = 3) -> FringeReport:
    """Mean spacing of interference maxima along one axis of a grid.

    The 1-D cut runs along ``axis`` (the grid's row or column name) through
    the strongest point of the windowed region; maxima below 10% of the
    window maximum are ignored. Raises TooFewFringes below min_count maxima.
    """
    if axis == grid.col_name:
        lines, coords = grid.values, grid.col_coords
    elif axis == grid.row_name:
        lines, coords = grid.values.T, grid.row_coords
    else:
        raise ValueError(f"axis {axis!r} not in grid ({grid.row_name}, {grid.col_name})")
    lo, hi = window
    sel = (coords >= lo) & (coords <= hi)
    if sel.sum() < 3:
        raise TooFewFringes("window covers fewer than 3 grid cells")
    sub = lines[:, sel]
    cut_index = int(np.unravel_index(np.argmax(sub), sub.shape)[0])
    values = sub[cut_index]
    coords_w = coords[sel]
    floor = 0.10 * float(values.max())
    idx = [i for i in _local_maxima_1d(values) if values[i] >= floor]
    if len(idx) < min_count:
        raise TooFewFringes(f"found {len(idx)} maxima, need {min_count}")
    pos = np.array([_refine_max(values, coords_w, i) for i in idx])
    gaps = np.diff(np.sort(pos))
    return FringeReport(mean_spacing=float(gaps.mean()),
                        spacing_stddev=float(gaps.std()),
                        count=len(idx))


def two_surface_oscillation_period(vp: VelocityPair, params: SystemParams) -> float:
    """Predicted D period of the reflected-peak oscillation.

    The reflections from the front and back surfaces acquire a relative
    phase 4 K_barrier D, so the reflected peak tracks sin^2(2 K_barrier D):
    successive maxima are pi/(2 K_barrier) apart in D (adjacent max/min
    pairs at half that).
    """
    ch = channel_wavevectors(vp, params)
    k2 = np.sqrt(2 * params.mu * (ch.E_rel - params.pe) + 0j) / params.hbar
    mag = abs(k2)
    if mag == 0:
        raise ZeroDivisionError("K_barrier vanishes for this channel")
    return float(np.pi / (2 * mag))


def type2_visibility(cfg: BarrierWavegroupConfig, params: SystemParams,
                     d_values, *, t_snapshot: float | None = None,
                     window_halfwidth: float | None = None,
                     n_window: int = 41) -> list[tuple[float, float]]:
    """Height of the reflected (twice-surface-interfering) peak versus D.

    For each half-width D the wavegroup is rebuilt, a post-reflection
    snapshot is taken, and the PDF maximum in a window around the classical
    recoil position is recorded. Requires the wavegroup to be spatially much
    larger than the interaction region so the two surface reflections stay
    coherent.
    """
    vp0 = VelocityPair(cfg.v0, cfg.V0)
    v_out, V_out = classical_recoil(vp0, params)
    sigma1 = params.hbar / (params.m * cfg.dv)
    sigma2 = params.hbar / (params.M * cfg.dV)
    if t_snapshot is None:
        # far enough that the reflected group has cleared the incident one
        t_snapshot = 4.0 * sigma1 / max(abs(cfg.v0 - v_out), 1e-12)
    # the x1 window must stay narrower than the reflected/transmitted
    # separation, or the window maximum picks up the wrong packet
    half1 = 1.5 * sigma1 if window_halfwidth is None else window_halfwidth
    half2 = 3.0 * sigma2 if window_halfwidth is None else window_halfwidth
    out = []
    for D in np.asarray(d_values, dtype=np.float64):
        p_d = replace(params, D=float(D))
        wg = BarrierWavegroup(cfg, p_d)
        t_c = -float(D) / (cfg.v0 - cfg.V0)
        x1_c = cfg.v0 * t_c + v_out * (t_snapshot - t_c)
        x2_c = cfg.V0 * t_c + V_out * (t_snapshot - t_c)
        grid = GridSpec(x1=(x1_c - half1, x1_c + half1),
                        x2=(x2_c - half2, x2_c + half2),
                        n1=n_window, n2=n_window,
                        t1=t_snapshot, t2=t_snapshot)
        fg = snapshot(wg, grid)
        out.append((float(D), float(fg.values.max())))
    return out
