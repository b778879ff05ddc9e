"""Joint PDFs, probability currents, snapshots, slices, and residuals.

Synchronous snapshots sample the joint PDF on an (x1, x2) grid at t1 = t2;
asynchronous slices freeze the particle coordinates and scan (x2, t2). Both
run through the same row evaluator, so a slice row at t2 = t1 is bitwise
identical to the matching snapshot row.

Conservation checks are deliberately semi-numerical: currents come from
analytic branch derivatives, while the outer derivatives of the local
conservation law are central finite differences. The residual therefore
measures O(h^2) truncation error, independent of the evaluator itself.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import simpson

from .branches import RowKernel, WaveSource, abs2
from .errors import StepTooCoarse

#: finite-difference step rule: the shortest wavelength in the superposition
#: divided by this (see default_fd_step); 50 resolves fringes, larger divisors
#: tighten conservation residuals.
FD_WAVELENGTH_DIVISOR = 50.0
#: conservation residuals scale as h^2; lambda/50 leaves them near 1e-2 on
#: fringe-bearing wavegroups, lambda/400 keeps the maximum below ~2e-4.
CONSERVATION_FD_DIVISOR = 400.0


@dataclass(frozen=True)
class GridSpec:
    """Evaluation grid: closed coordinate intervals plus time labels.

    t1/t2 are scalars for synchronous snapshots; for asynchronous scans t2
    is a (lo, hi, count) triple.
    """

    x1: tuple[float, float]
    x2: tuple[float, float]
    n1: int
    n2: int
    t1: float | tuple = 0.0
    t2: float | tuple = 0.0

    def __post_init__(self):
        for name, rng in (("x1", self.x1), ("x2", self.x2)):
            lo, hi = rng
            if not hi > lo:
                raise ValueError(f"{name} range must be non-degenerate")
        if self.n1 < 2 or self.n2 < 2:
            raise ValueError("grid counts must be >= 2")

    def x1_axis(self) -> np.ndarray:
        return np.linspace(self.x1[0], self.x1[1], self.n1)

    def x2_axis(self) -> np.ndarray:
        return np.linspace(self.x2[0], self.x2[1], self.n2)

    def t2_axis(self) -> np.ndarray:
        lo, hi, n = self.t2
        if n < 2 or not hi > lo:
            raise ValueError("t2 scan needs (lo, hi, count>=2) with hi > lo")
        return np.linspace(lo, hi, int(n))


@dataclass
class FieldGrid:
    """A 2-D field (PDF, current, or residual) with axis metadata."""

    values: np.ndarray
    row_name: str
    row_coords: np.ndarray
    col_name: str
    col_coords: np.ndarray
    kind: str = "pdf"
    normalization: str = "raw"
    meta: dict | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if not np.all(np.isfinite(self.values)):
            raise ValueError(f"{self.kind} grid contains non-finite values")
        if self.kind == "pdf" and np.any(self.values < 0):
            raise ValueError("pdf grid contains negative values")

    def normalized(self, mode: str) -> "FieldGrid":
        if mode == "raw":
            return self
        if mode != "max1":
            raise ValueError(f"unknown normalization {mode!r}")
        peak = float(self.values.max())
        vals = self.values / peak if peak > 0 else self.values.copy()
        return replace(self, values=vals, normalization="max1")


def default_fd_step(source: WaveSource, grid_dx: float | None = None,
                    divisor: float = FD_WAVELENGTH_DIVISOR) -> float:
    """Step h = min(grid spacing, lambda_min/divisor).

    lambda_min is set by the largest spatial wavevector or temporal frequency
    in the superposition, so one h serves all four stencil directions.
    """
    scale = max(source.wavevector_scale(), source.frequency_scale())
    h = 2.0 * math.pi / scale / divisor
    if grid_dx is not None:
        h = min(h, grid_dx)
    return h


# -- pointwise operations ----------------------------------------------------

def joint_pdf(source: WaveSource, x1, x2, t1, t2) -> np.ndarray:
    """|Psi|^2 at lab points (arrays broadcast)."""
    return abs2(source.amplitude(x1, x2, t1, t2))


def currents(source: WaveSource, x1, x2, t1, t2, *, method: str = "analytic",
             h: float | None = None):
    """Probability current densities (j1, j2).

    j1 = hbar Im(Psi* dPsi/dx1)/m and j2 likewise with M. The analytic route
    differentiates the branch phases exactly; method='fd' falls back to
    central differences and raises StepTooCoarse when halving the step moves
    the result by more than 1%.
    """
    p = source.params
    if method == "analytic":
        d = source.amplitude_and_derivatives(x1, x2, t1, t2, which=("x1", "x2"))
        j1 = p.hbar * (np.conj(d["value"]) * d["x1"]).imag / p.m
        j2 = p.hbar * (np.conj(d["value"]) * d["x2"]).imag / p.M
        return j1, j2
    if method != "fd":
        raise ValueError(f"unknown method {method!r}")
    if h is None:
        h = default_fd_step(source)
    psi = source.amplitude(x1, x2, t1, t2)

    def fd_pair(step):
        d1 = (source.amplitude(np.asarray(x1) + step, x2, t1, t2)
              - source.amplitude(np.asarray(x1) - step, x2, t1, t2)) / (2 * step)
        d2 = (source.amplitude(x1, np.asarray(x2) + step, t1, t2)
              - source.amplitude(x1, np.asarray(x2) - step, t1, t2)) / (2 * step)
        return (p.hbar * (np.conj(psi) * d1).imag / p.m,
                p.hbar * (np.conj(psi) * d2).imag / p.M)

    j1, j2 = fd_pair(h)
    j1h, j2h = fd_pair(0.5 * h)
    scale = max(float(np.max(np.abs(j1h))), float(np.max(np.abs(j2h))), 1e-300)
    mismatch = max(float(np.max(np.abs(j1 - j1h))),
                   float(np.max(np.abs(j2 - j2h)))) / scale
    if mismatch > 0.01:
        raise StepTooCoarse(
            f"finite-difference currents moved by {mismatch:.2%} when halving "
            f"h={h:.3e}; pass a smaller step")
    return j1h, j2h


def conservation_residual(source: WaveSource, x1, x2, t1, t2,
                          h: float | None = None):
    """Local conservation-law defect and the scale of its largest term.

    residual = d(PDF)/dt1 + d(PDF)/dt2 + dj1/dx1 + dj2/dx2, with every outer
    derivative a central difference of step h. Currents are analytic.
    """
    if h is None:
        h = default_fd_step(source, divisor=CONSERVATION_FD_DIVISOR)
    x1 = np.asarray(x1, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)

    def pdf(tt1, tt2):
        return joint_pdf(source, x1, x2, tt1, tt2)

    dt1 = (pdf(np.asarray(t1) + h, t2) - pdf(np.asarray(t1) - h, t2)) / (2 * h)
    dt2 = (pdf(t1, np.asarray(t2) + h) - pdf(t1, np.asarray(t2) - h)) / (2 * h)
    j1p, _ = currents(source, x1 + h, x2, t1, t2)
    j1m, _ = currents(source, x1 - h, x2, t1, t2)
    _, j2p = currents(source, x1, x2 + h, t1, t2)
    _, j2m = currents(source, x1, x2 - h, t1, t2)
    dj1 = (j1p - j1m) / (2 * h)
    dj2 = (j2p - j2m) / (2 * h)
    residual = dt1 + dt2 + dj1 + dj2
    scale = np.max(np.abs(np.stack([dt1, dt2, dj1, dj2])), axis=0)
    return residual, scale


def pde_residual(source: WaveSource, x1, x2, t1, t2, h: float):
    """Finite-difference residual of the two-time Schroedinger equation.

    Second x-derivatives use 5-point stencils (O(h^4)), time derivatives
    2-point central stencils (O(h^2)), so the residual decays as h^2. All
    stencil points must stay inside one region; callers sample interior
    points with a margin of at least 2h.
    """
    p = source.params
    x1 = np.asarray(x1, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    t1 = np.asarray(t1, dtype=np.float64)
    t2 = np.asarray(t2, dtype=np.float64)
    psi = source.amplitude(x1, x2, t1, t2)

    def second(axis_vals, shift_fn):
        return (-shift_fn(-2 * h) + 16 * shift_fn(-h) - 30 * psi
                + 16 * shift_fn(h) - shift_fn(2 * h)) / (12 * h * h)

    d2x1 = second(x1, lambda s: source.amplitude(x1 + s, x2, t1, t2))
    d2x2 = second(x2, lambda s: source.amplitude(x1, x2 + s, t1, t2))
    dt1 = (source.amplitude(x1, x2, t1 + h, t2)
           - source.amplitude(x1, x2, t1 - h, t2)) / (2 * h)
    dt2 = (source.amplitude(x1, x2, t1, t2 + h)
           - source.amplitude(x1, x2, t1, t2 - h)) / (2 * h)

    kin1 = p.hbar ** 2 / (2 * p.m) * d2x1
    kin2 = p.hbar ** 2 / (2 * p.M) * d2x2
    x_rel = x1 - x2
    pe_val = 0.0 if source.params.infinite_well else source.params.pe
    pot = np.where(np.abs(x_rel) <= p.D, pe_val, 0.0) * psi
    tdot = 1j * p.hbar * (dt1 + dt2)
    residual = tdot + kin1 + kin2 - pot
    scale = np.max(np.abs(np.stack([
        np.broadcast_to(1j * p.hbar * dt1, residual.shape),
        np.broadcast_to(1j * p.hbar * dt2, residual.shape),
        np.broadcast_to(kin1, residual.shape),
        np.broadcast_to(kin2, residual.shape),
        np.broadcast_to(pot, residual.shape),
    ])), axis=0)
    return residual, scale


# -- grid operations ----------------------------------------------------------

def _run_rows(n_rows: int, work, threads: int):
    if threads <= 1:
        for i in range(n_rows):
            work(i)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, range(n_rows)))


def snapshot(source: WaveSource, grid: GridSpec, *, normalization: str = "raw",
             threads: int = 1) -> FieldGrid:
    """Synchronous joint PDF over the (x1, x2) grid at t1 = t2."""
    return snapshot_series(source, grid, [ _snapshot_time(grid) ],
                           normalization=normalization, threads=threads)[0]


def snapshot_series(source: WaveSource, grid: GridSpec, times,
                    *, normalization: str = "raw", threads: int = 1):
    """Snapshots at several times, sharing one set of phase tables."""
    x1 = grid.x1_axis()
    x2 = grid.x2_axis()
    kern = RowKernel(source, x2)
    out = []
    for t in times:
        vals = np.empty((grid.n1, grid.n2))

        def work(i, t=t, vals=vals):
            vals[i] = abs2(kern.rows(float(x1[i]), float(t), float(t))[0])

        _run_rows(grid.n1, work, threads)
        fg = FieldGrid(values=vals, row_name="x1", row_coords=x1,
                       col_name="x2", col_coords=x2, kind="pdf",
                       meta={"t": float(t)})
        out.append(fg.normalized(normalization))
    return out


def _snapshot_time(grid: GridSpec) -> float:
    if isinstance(grid.t1, tuple) or isinstance(grid.t2, tuple):
        raise ValueError("snapshot needs scalar times")
    if grid.t1 != grid.t2:
        raise ValueError("snapshot is synchronous: t1 must equal t2")
    return float(grid.t1)


def asynchronous_slice(source: WaveSource, x1: float, t1: float,
                       grid: GridSpec, *, normalization: str = "raw",
                       threads: int = 1) -> FieldGrid:
    """Joint PDF over (x2, t2) with the particle frozen at (x1, t1)."""
    x2 = grid.x2_axis()
    t2 = grid.t2_axis()
    kern = RowKernel(source, x2)
    vals = np.empty((t2.size, x2.size))

    def work(r):
        vals[r] = abs2(kern.rows(float(x1), float(t1), float(t2[r]))[0])

    _run_rows(t2.size, work, threads)
    fg = FieldGrid(values=vals, row_name="t2", row_coords=t2,
                   col_name="x2", col_coords=x2, kind="pdf",
                   meta={"x1": float(x1), "t1": float(t1)})
    return fg.normalized(normalization)


def current_snapshot(source: WaveSource, grid: GridSpec, which: str = "j1",
                     *, threads: int = 1) -> FieldGrid:
    """Synchronous probability-current grid (kind 'j1' or 'j2')."""
    if which not in ("j1", "j2"):
        raise ValueError("which must be 'j1' or 'j2'")
    t = _snapshot_time(grid)
    x1 = grid.x1_axis()
    x2 = grid.x2_axis()
    kern = RowKernel(source, x2)
    tab = source.table
    deriv = 1j * (tab.k1 if which == "j1" else tab.k2)
    mass = source.params.m if which == "j1" else source.params.M
    vals = np.empty((grid.n1, grid.n2))

    def work(i):
        psi, dpsi = kern.rows(float(x1[i]), t, t, variants=[None, deriv])
        vals[i] = source.params.hbar * (np.conj(psi) * dpsi).imag / mass

    _run_rows(grid.n1, work, threads)
    return FieldGrid(values=vals, row_name="x1", row_coords=x1,
                     col_name="x2", col_coords=x2, kind=which, meta={"t": t})


def conservation_grid(source: WaveSource, grid: GridSpec, *,
                      h: float | None = None, threads: int = 1,
                      scale_floor: float = 1e-9):
    """Relative conservation residual over a synchronous grid.

    Returns (FieldGrid of |residual|/term-scale, summary dict). Points whose
    local term scale is below scale_floor times the global maximum are
    reported as zero: where every term vanishes there is nothing to violate.
    """
    t = _snapshot_time(grid)
    x1 = grid.x1_axis()
    x2 = grid.x2_axis()
    dx = min(x1[1] - x1[0], x2[1] - x2[0])
    if h is None:
        h = default_fd_step(source, dx, divisor=CONSERVATION_FD_DIVISOR)
    kern = RowKernel(source, x2)
    tab = source.table
    p = source.params
    vt1p = np.exp(-1j * tab.w1 * h)
    vt1m = np.exp(1j * tab.w1 * h)
    vt2p = np.exp(-1j * tab.w2 * h)
    vt2m = np.exp(1j * tab.w2 * h)
    f_dx1 = 1j * tab.k1
    f_dx2 = 1j * tab.k2

    res = np.empty((grid.n1, grid.n2))
    scale = np.empty((grid.n1, grid.n2))

    def work(i):
        xi = float(x1[i])
        base = kern.rows(xi, t, t, variants=[None, vt1p, vt1m, vt2p, vt2m])
        dt1 = (abs2(base[1]) - abs2(base[2])) / (2 * h)
        dt2 = (abs2(base[3]) - abs2(base[4])) / (2 * h)
        vp, dp = kern.rows(xi + h, t, t, variants=[None, f_dx1])
        vm, dm = kern.rows(xi - h, t, t, variants=[None, f_dx1])
        dj1 = (p.hbar * (np.conj(vp) * dp).imag / p.m
               - p.hbar * (np.conj(vm) * dm).imag / p.m) / (2 * h)
        vp, dp = kern.rows(xi, t, t, variants=[None, f_dx2], x2_offset=h)
        vm, dm = kern.rows(xi, t, t, variants=[None, f_dx2], x2_offset=-h)
        dj2 = (p.hbar * (np.conj(vp) * dp).imag / p.M
               - p.hbar * (np.conj(vm) * dm).imag / p.M) / (2 * h)
        res[i] = dt1 + dt2 + dj1 + dj2
        scale[i] = np.max(np.abs(np.stack([dt1, dt2, dj1, dj2])), axis=0)

    _run_rows(grid.n1, work, threads)
    global_scale = float(scale.max())
    live = scale > scale_floor * global_scale
    rel = np.zeros_like(res)
    np.divide(np.abs(res), scale, out=rel, where=live)
    summary = {"h": h, "max_rel_residual": float(rel.max()),
               "mean_rel_residual": float(rel.mean()),
               "term_scale": global_scale, "t": t}
    fg = FieldGrid(values=rel, row_name="x1", row_coords=x1, col_name="x2",
                   col_coords=x2, kind="residual", meta=summary)
    return fg, summary


def segment_residual(source: WaveSource, axis: str, a: float, b: float, *,
                     x_other: float, t1: float, t2: float,
                     n: int = 201, h: float | None = None):
    """Segment form of probability conservation on [a, b].

    axis='x1': d/dt1 of the PDF integral over x1 in [a, b] plus the net j1
    flux through the endpoints (x2 fixed at x_other); axis='x2' swaps roles.
    The integral uses Simpson's rule, which keeps quadrature error below the
    time-stencil error even on fringe-bearing integrands. Returns
    (residual, scale).
    """
    if h is None:
        h = default_fd_step(source, divisor=CONSERVATION_FD_DIVISOR)
    xs = np.linspace(a, b, n)
    if axis == "x1":
        args = lambda tt1, tt2: (xs, x_other, tt1, tt2)
        tplus, tminus = (t1 + h, t2), (t1 - h, t2)
        j_index = 0
    elif axis == "x2":
        args = lambda tt1, tt2: (x_other, xs, tt1, tt2)
        tplus, tminus = (t1, t2 + h), (t1, t2 - h)
        j_index = 1
    else:
        raise ValueError("axis must be 'x1' or 'x2'")
    ip = simpson(joint_pdf(source, *args(*tplus)), x=xs)
    im = simpson(joint_pdf(source, *args(*tminus)), x=xs)
    dint = (ip - im) / (2 * h)
    if axis == "x1":
        ja = currents(source, a, x_other, t1, t2)[j_index]
        jb = currents(source, b, x_other, t1, t2)[j_index]
    else:
        ja = currents(source, x_other, a, t1, t2)[j_index]
        jb = currents(source, x_other, b, t1, t2)[j_index]
    residual = dint + float(jb) - float(ja)
    scale = max(abs(dint), abs(float(jb) - float(ja)), abs(float(jb)), abs(float(ja)))
    return residual, scale
