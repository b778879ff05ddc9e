"""Branch tables: the common exponential form of every two-time state.

Every energy eigenstate here, and every Gaussian superposition of them, is a
finite sum of exponential branches

    c * exp(i * (K_cm * x_cm + q * x_rel - w1 * t1 - w2 * t2))

restricted to one region of the relative coordinate. The per-branch lab
wavevectors k1 = (m/M_tot) K_cm + q and k2 = (M/M_tot) K_cm - q give the
particle and well/barrier momenta, and the temporal frequencies w1, w2 carry
the per-subsystem energy split. Evanescent branches have complex q, k1, k2,
w1, w2; K_cm is always real.

Evaluation is pure and deterministic: summation order over branches is fixed
by table order, and grid parallelism (if any) is over evaluation points only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .system import SystemParams

# Region codes. MID is the interaction region |x_rel| <= D shared by both
# incidence orientations; BEFORE/AFTER carry the orientation (P: incident
# along +x_rel, N: mirrored). WELL is the open interval |x_rel| < D.
R_WELL = 0
R_BEFORE_P = 1
R_MID = 2
R_AFTER_P = 3
R_BEFORE_N = 4
R_AFTER_N = 5

_REGION_NAMES = {
    R_WELL: "well",
    R_BEFORE_P: "before",
    R_MID: "barrier",
    R_AFTER_P: "after",
    R_BEFORE_N: "before",
    R_AFTER_N: "after",
}


def region_name(code: int) -> str:
    return _REGION_NAMES[code]


def unit_phase(theta: np.ndarray) -> np.ndarray:
    """exp(1j*theta) for real theta, via separate cos/sin (faster than cexp)."""
    theta = np.asarray(theta, dtype=np.float64)
    out = np.empty(theta.shape, dtype=np.complex128)
    np.cos(theta, out=out.real)
    np.sin(theta, out=out.imag)
    return out


def cexp_i(phase: np.ndarray) -> np.ndarray:
    """exp(1j*phase) for real or complex phase."""
    if np.iscomplexobj(phase):
        return np.exp(1j * phase)
    return unit_phase(phase)


def abs2(z: np.ndarray) -> np.ndarray:
    return z.real * z.real + z.imag * z.imag


def region_mask(code: int, x_rel: np.ndarray, D: float) -> np.ndarray:
    if code == R_WELL:
        return np.abs(x_rel) < D
    if code == R_MID:
        return np.abs(x_rel) <= D
    if code in (R_BEFORE_P, R_AFTER_N):
        return x_rel < -D
    if code in (R_AFTER_P, R_BEFORE_N):
        return x_rel > D
    raise ValueError(f"unknown region code {code}")


@dataclass(frozen=True)
class BranchTable:
    """Parallel per-branch arrays; the canonical internal state representation."""

    region: np.ndarray   # int8 region codes
    coeff: np.ndarray    # complex amplitudes (weights folded in for wavegroups)
    kcm: np.ndarray      # real total wavevector K_cm
    q: np.ndarray        # complex signed relative wavevector
    k1: np.ndarray       # complex lab wavevector, particle
    k2: np.ndarray       # complex lab wavevector, well/barrier
    w1: np.ndarray       # complex phase frequency paired with t1
    w2: np.ndarray       # complex phase frequency paired with t2

    def __len__(self) -> int:
        return self.region.size

    @staticmethod
    def build(region, coeff, kcm, q, params: SystemParams, w_extra=None):
        """Assemble a table from region/coeff/K_cm/q, deriving k1, k2, w1, w2.

        w_extra, if given, is added to both w1 and w2 (used to attach the
        potential-energy phase of interaction-region branches as
        exp(-i PE (t1+t2)/2)).
        """
        region = np.asarray(region, dtype=np.int8)
        coeff = np.asarray(coeff, dtype=np.complex128)
        kcm = np.asarray(kcm, dtype=np.float64)
        q = np.asarray(q, dtype=np.complex128)
        k1 = (params.m / params.m_tot) * kcm + q
        k2 = (params.M / params.m_tot) * kcm - q
        w1 = params.hbar * k1 * k1 / (2.0 * params.m)
        w2 = params.hbar * k2 * k2 / (2.0 * params.M)
        if w_extra is not None:
            w1 = w1 + np.asarray(w_extra, dtype=np.complex128)
            w2 = w2 + np.asarray(w_extra, dtype=np.complex128)
        return BranchTable(region=region, coeff=coeff, kcm=kcm, q=q,
                           k1=k1, k2=k2, w1=w1, w2=w2)

    @staticmethod
    def concatenate(tables):
        return BranchTable(*(np.concatenate([getattr(t, f) for t in tables])
                             for f in ("region", "coeff", "kcm", "q",
                                       "k1", "k2", "w1", "w2")))


class WaveSource:
    """A two-time wavefunction given by a branch table.

    Subclasses (eigenstates, wavegroups) populate ``table`` and ``params``.
    All evaluation methods broadcast over point arrays and are thread-safe.
    """

    params: SystemParams
    table: BranchTable

    # -- pointwise evaluation -------------------------------------------------

    def amplitude(self, x1, x2, t1, t2) -> np.ndarray:
        """Complex amplitude at lab points (arrays broadcast)."""
        return self._eval_multi(x1, x2, t1, t2, [None])[0]

    def derivative(self, which: str, x1, x2, t1, t2) -> np.ndarray:
        """Analytic first derivative along 'x1', 'x2', 't1' or 't2'."""
        return self._eval_multi(x1, x2, t1, t2, [self._factor(which)])[0]

    def amplitude_and_derivatives(self, x1, x2, t1, t2, which=("x1", "x2")):
        """Amplitude plus the requested analytic derivatives, sharing work.

        Returns a dict with key 'value' and one key per requested derivative;
        'x1x1' and 'x2x2' select analytic second derivatives.
        """
        factors = [None] + [self._factor(w) for w in which]
        outs = self._eval_multi(x1, x2, t1, t2, factors)
        result = {"value": outs[0]}
        for w, o in zip(which, outs[1:]):
            result[w] = o
        return result

    def _factor(self, which: str) -> np.ndarray:
        t = self.table
        if which == "x1":
            return 1j * t.k1
        if which == "x2":
            return 1j * t.k2
        if which == "t1":
            return -1j * t.w1
        if which == "t2":
            return -1j * t.w2
        if which == "x1x1":
            return -t.k1 * t.k1
        if which == "x2x2":
            return -t.k2 * t.k2
        raise ValueError(f"unknown derivative {which!r}")

    def _eval_multi(self, x1, x2, t1, t2, factors) -> list:
        arrs = [np.asarray(a, dtype=np.float64) for a in (x1, x2, t1, t2)]
        x1b, x2b, t1b, t2b = np.broadcast_arrays(*arrs)
        shape = x1b.shape
        outs = [np.zeros(shape, dtype=np.complex128) for _ in factors]
        x_rel = x1b - x2b
        p = self.params
        x_cm = (p.m * x1b + p.M * x2b) / p.m_tot
        t = self.table
        for code in np.unique(t.region):
            sel = region_mask(int(code), x_rel, p.D)
            if not sel.any():
                continue
            b = np.nonzero(t.region == code)[0]
            phase = (np.multiply.outer(t.kcm[b], x_cm[sel])
                     + np.multiply.outer(t.q[b], x_rel[sel])
                     - np.multiply.outer(t.w1[b], t1b[sel])
                     - np.multiply.outer(t.w2[b], t2b[sel]))
            E = cexp_i(phase)
            for out, f in zip(outs, factors):
                c = t.coeff[b] if f is None else t.coeff[b] * f[b]
                out[sel] += np.einsum("b,bp->p", c, E)
        return [o.reshape(shape) for o in outs]

    # -- metadata used by finite-difference step heuristics --------------------

    def wavevector_scale(self) -> float:
        """Largest spatial wavevector magnitude present in the superposition."""
        t = self.table
        return float(max(np.abs(t.k1).max(), np.abs(t.k2).max()))

    def frequency_scale(self) -> float:
        """Largest temporal phase frequency magnitude."""
        t = self.table
        return float(max(np.abs(t.w1).max(), np.abs(t.w2).max()))


@dataclass
class _RealGroup:
    code: int
    idx: np.ndarray       # indices into the full table
    coeff: np.ndarray
    k1: np.ndarray        # real
    k2: np.ndarray        # real
    w1: np.ndarray        # real
    w2: np.ndarray        # real
    E2: np.ndarray        # unit_phase(outer(k2, x2_axis))
    _off_cache: dict = field(default_factory=dict)

    def k2_shift(self, off: float) -> np.ndarray:
        ph = self._off_cache.get(off)
        if ph is None:
            ph = unit_phase(self.k2 * off)
            self._off_cache[off] = ph
        return ph


@dataclass
class _ComplexGroup:
    code: int
    idx: np.ndarray
    coeff: np.ndarray
    kcm: np.ndarray
    q: np.ndarray
    w1: np.ndarray
    w2: np.ndarray


class RowKernel:
    """Fast evaluator for x2 rows of a source at fixed (x1, t1, t2).

    Exploits the branch structure: exp(i k2 x2) factors are precomputed per
    branch over the x2 axis, so one row costs a per-branch phase plus one
    deterministic einsum per region slice. Branches with complex k2
    (evanescent interaction-region branches) are evaluated pointwise on the
    narrow diagonal band where they contribute.

    ``variants`` in :meth:`rows` are per-branch multiplier arrays over the
    full table (or None for the plain amplitude); they implement analytic
    derivatives and constant coordinate shifts without extra phase tables.
    """

    def __init__(self, source: WaveSource, x2_axis: np.ndarray):
        self.params = source.params
        self.x2 = np.asarray(x2_axis, dtype=np.float64)
        if self.x2.ndim != 1 or self.x2.size < 1:
            raise ValueError("x2 axis must be a 1-D array")
        if self.x2.size > 1 and not np.all(np.diff(self.x2) > 0):
            raise ValueError("x2 axis must be strictly ascending")
        t = source.table
        self.real_groups: list[_RealGroup] = []
        self.complex_groups: list[_ComplexGroup] = []
        for code in np.unique(t.region):
            sel = t.region == code
            is_real = (t.k2.imag[sel] == 0) & (t.k1.imag[sel] == 0) \
                & (t.w1.imag[sel] == 0) & (t.w2.imag[sel] == 0)
            idx_r = np.nonzero(sel)[0][is_real]
            idx_c = np.nonzero(sel)[0][~is_real]
            if idx_r.size:
                k2r = t.k2[idx_r].real
                self.real_groups.append(_RealGroup(
                    code=int(code), idx=idx_r, coeff=t.coeff[idx_r],
                    k1=t.k1[idx_r].real, k2=k2r,
                    w1=t.w1[idx_r].real, w2=t.w2[idx_r].real,
                    E2=unit_phase(np.multiply.outer(k2r, self.x2))))
            if idx_c.size:
                self.complex_groups.append(_ComplexGroup(
                    code=int(code), idx=idx_c, coeff=t.coeff[idx_c],
                    kcm=t.kcm[idx_c], q=t.q[idx_c],
                    w1=t.w1[idx_c], w2=t.w2[idx_c]))

    def _bounds(self, code: int, x1: float, off: float) -> tuple[int, int]:
        x2 = self.x2
        a = x1 - off - self.params.D
        b = x1 - off + self.params.D
        if code == R_WELL:
            return (int(np.searchsorted(x2, a, "right")),
                    int(np.searchsorted(x2, b, "left")))
        if code == R_MID:
            return (int(np.searchsorted(x2, a, "left")),
                    int(np.searchsorted(x2, b, "right")))
        if code in (R_BEFORE_P, R_AFTER_N):
            return int(np.searchsorted(x2, b, "right")), x2.size
        if code in (R_AFTER_P, R_BEFORE_N):
            return 0, int(np.searchsorted(x2, a, "left"))
        raise ValueError(f"unknown region code {code}")

    def rows(self, x1: float, t1: float, t2: float, variants=(None,),
             x2_offset: float = 0.0) -> np.ndarray:
        """Evaluate len(variants) rows over the x2 axis; shape (n_var, n2)."""
        p = self.params
        out = np.zeros((len(variants), self.x2.size), dtype=np.complex128)
        for grp in self.real_groups:
            lo, hi = self._bounds(grp.code, x1, x2_offset)
            if lo >= hi:
                continue
            b0 = grp.coeff * unit_phase(grp.k1 * x1 - grp.w1 * t1 - grp.w2 * t2)
            if x2_offset != 0.0:
                b0 = b0 * grp.k2_shift(x2_offset)
            stack = np.stack([b0 if m is None else b0 * m[grp.idx]
                              for m in variants])
            out[:, lo:hi] += np.einsum("vb,bj->vj", stack, grp.E2[:, lo:hi])
        for grp in self.complex_groups:
            lo, hi = self._bounds(grp.code, x1, x2_offset)
            if lo >= hi:
                continue
            x2s = self.x2[lo:hi] + x2_offset
            x_rel = x1 - x2s
            x_cm = (p.m * x1 + p.M * x2s) / p.m_tot
            phase = (np.multiply.outer(grp.kcm, x_cm)
                     + np.multiply.outer(grp.q, x_rel)
                     - grp.w1[:, None] * t1 - grp.w2[:, None] * t2)
            E = np.exp(1j * phase)
            for vi, m in enumerate(variants):
                c = grp.coeff if m is None else grp.coeff * m[grp.idx]
                out[vi, lo:hi] += np.einsum("b,bj->j", c, E)
        return out
