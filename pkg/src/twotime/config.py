"""Run configuration: JSON schema, validation, and figure presets.

A run config pins the physical system, the wavegroup, the evaluation grid,
and output options. Parsing is strict: unknown keys are rejected with the
offending path, and every field is validated before any computation starts.

Presets resolve the dimensionless figure ratios against concrete anchors
(m = 1 and V0 = 1 for the scattering figures, V0 = 10 for the trapped-well
figures so the wavegroup fits inside the well; D per figure so the
reflected peak sits away from a two-surface transparency). Anchors and
every derived number stay visible in the returned config.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ParseError, ValidationError
from .field import GridSpec
from .system import SystemParams
from .wavegroup import BarrierWavegroupConfig, WellWavegroupConfig

SCENARIOS = ("finite-well", "barrier", "infinite-well")
FORMATS = ("csv", "pgm", "both")
NORMALIZATIONS = ("raw", "max1")

PRESET_NAMES = ("fig1", "fig2", "fig4a", "fig4b", "fig5", "fig6")


@dataclass(frozen=True)
class OutputConfig:
    format: str = "csv"
    normalization: str = "raw"
    prefix: str = "out/run"


@dataclass(frozen=True)
class AnalysisConfig:
    peak_threshold: float = 0.15
    min_separation: int = 3
    fringe_axis: str | None = None
    fringe_window: tuple[float, float] | None = None
    blur_sigma: float = 0.0


@dataclass(frozen=True)
class CoeffsConfig:
    e_min: float
    e_max: float
    n: int = 50


@dataclass(frozen=True)
class RunConfig:
    scenario: str
    system: SystemParams
    wavegroup: BarrierWavegroupConfig | WellWavegroupConfig
    grid: GridSpec
    times: tuple[float, ...]
    output: OutputConfig
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    coeffs: CoeffsConfig | None = None
    x1_fixed: float | None = None
    t1_fixed: float | None = None
    name: str | None = None
    raw: dict | None = None

    def physics_hash(self) -> str:
        """Short hash of the physics-defining fields (not output options)."""
        subset = {k: self.raw[k] for k in
                  ("scenario", "system", "wavegroup", "grid") if k in self.raw}
        blob = json.dumps(subset, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:12]


def _require(cond: bool, path: str, msg: str):
    if not cond:
        raise ValidationError(f"{path}: {msg}")


def _check_keys(d: dict, allowed: set[str], path: str):
    unknown = set(d) - allowed
    if unknown:
        raise ValidationError(
            f"{path}: unknown key(s) {sorted(unknown)}; allowed: {sorted(allowed)}")


def _number(d: dict, key: str, path: str, required=True, default=None):
    if key not in d:
        _require(not required, f"{path}.{key}", "missing required field")
        return default
    v = d[key]
    _require(isinstance(v, (int, float)) and not isinstance(v, bool)
             and math.isfinite(v), f"{path}.{key}", "must be a finite number")
    return float(v)


def _integer(d: dict, key: str, path: str, required=True, default=None):
    if key not in d:
        _require(not required, f"{path}.{key}", "missing required field")
        return default
    v = d[key]
    _require(isinstance(v, int) and not isinstance(v, bool),
             f"{path}.{key}", "must be an integer")
    return int(v)


def _pair(d: dict, key: str, path: str, required=True):
    if key not in d:
        _require(not required, f"{path}.{key}", "missing required field")
        return None
    v = d[key]
    _require(isinstance(v, list) and len(v) == 2
             and all(isinstance(x, (int, float)) and not isinstance(x, bool)
                     for x in v),
             f"{path}.{key}", "must be a [lo, hi] number pair")
    return (float(v[0]), float(v[1]))


def parse_config(data: dict) -> RunConfig:
    """Validate a parsed JSON document into a RunConfig."""
    _require(isinstance(data, dict), "config", "top level must be an object")
    _check_keys(data, {"scenario", "system", "wavegroup", "grid", "output",
                       "analysis", "coeffs", "name"}, "config")
    scenario = data.get("scenario")
    _require(scenario in SCENARIOS, "config.scenario",
             f"must be one of {SCENARIOS}")

    sysd = data.get("system")
    _require(isinstance(sysd, dict), "config.system", "missing or not an object")
    infinite = scenario == "infinite-well"
    allowed = {"m", "M", "D", "hbar"} | (set() if infinite else {"pe"})
    _check_keys(sysd, allowed, "config.system")
    kwargs = dict(m=_number(sysd, "m", "config.system"),
                  M=_number(sysd, "M", "config.system"),
                  D=_number(sysd, "D", "config.system"),
                  hbar=_number(sysd, "hbar", "config.system",
                               required=False, default=1.0),
                  infinite_well=infinite)
    if not infinite:
        pe = _number(sysd, "pe", "config.system")
        if scenario == "finite-well":
            _require(pe < 0, "config.system.pe", "finite-well requires pe < 0")
        else:
            # pe == 0 is allowed so coefficient sweeps can cover the
            # identity-scattering anchor
            _require(pe >= 0, "config.system.pe", "barrier requires pe >= 0")
        kwargs["pe"] = pe
    try:
        system = SystemParams(**kwargs)
    except ValueError as e:
        raise ValidationError(f"config.system: {e}") from e

    wgd = data.get("wavegroup")
    _require(isinstance(wgd, dict), "config.wavegroup", "missing or not an object")
    try:
        if infinite:
            _check_keys(wgd, {"n0", "dx", "V0", "dV", "n_V", "span", "n_range"},
                        "config.wavegroup")
            n_range = wgd.get("n_range")
            if n_range is not None:
                _require(isinstance(n_range, list) and len(n_range) == 2
                         and all(isinstance(x, int) for x in n_range),
                         "config.wavegroup.n_range", "must be an [lo, hi] int pair")
                n_range = (n_range[0], n_range[1])
            wavegroup = WellWavegroupConfig(
                n0=_number(wgd, "n0", "config.wavegroup"),
                dx=_number(wgd, "dx", "config.wavegroup"),
                V0=_number(wgd, "V0", "config.wavegroup"),
                dV=_number(wgd, "dV", "config.wavegroup"),
                n_V=_integer(wgd, "n_V", "config.wavegroup",
                             required=False, default=64),
                span=_number(wgd, "span", "config.wavegroup",
                             required=False, default=4.0),
                n_range=n_range)
        else:
            _check_keys(wgd, {"v0", "dv", "V0", "dV", "n_v", "n_V", "span"},
                        "config.wavegroup")
            wavegroup = BarrierWavegroupConfig(
                v0=_number(wgd, "v0", "config.wavegroup"),
                dv=_number(wgd, "dv", "config.wavegroup"),
                V0=_number(wgd, "V0", "config.wavegroup"),
                dV=_number(wgd, "dV", "config.wavegroup"),
                n_v=_integer(wgd, "n_v", "config.wavegroup",
                             required=False, default=64),
                n_V=_integer(wgd, "n_V", "config.wavegroup",
                             required=False, default=64),
                span=_number(wgd, "span", "config.wavegroup",
                             required=False, default=4.0))
    except ValueError as e:
        raise ValidationError(f"config.wavegroup: {e}") from e

    gd = data.get("grid")
    _require(isinstance(gd, dict), "config.grid", "missing or not an object")
    _check_keys(gd, {"x1", "x2", "n1", "n2", "times",
                     "x1_fixed", "t1_fixed", "t2", "n_t"}, "config.grid")
    x1 = _pair(gd, "x1", "config.grid")
    x2 = _pair(gd, "x2", "config.grid")
    n1 = _integer(gd, "n1", "config.grid")
    n2 = _integer(gd, "n2", "config.grid")
    times_raw = gd.get("times", [0.0])
    _require(isinstance(times_raw, list) and times_raw
             and all(isinstance(x, (int, float)) and not isinstance(x, bool)
                     for x in times_raw),
             "config.grid.times", "must be a non-empty list of numbers")
    times = tuple(float(t) for t in times_raw)
    x1_fixed = _number(gd, "x1_fixed", "config.grid", required=False)
    t1_fixed = _number(gd, "t1_fixed", "config.grid", required=False)
    t2span = _pair(gd, "t2", "config.grid", required=False)
    n_t = _integer(gd, "n_t", "config.grid", required=False)
    t2_field: float | tuple = times[0]
    if t2span is not None:
        _require(n_t is not None and n_t >= 2, "config.grid.n_t",
                 "required (>= 2) when t2 is a range")
        t2_field = (t2span[0], t2span[1], n_t)
    try:
        grid = GridSpec(x1=x1, x2=x2, n1=n1, n2=n2, t1=times[0], t2=t2_field)
    except ValueError as e:
        raise ValidationError(f"config.grid: {e}") from e

    od = data.get("output", {})
    _require(isinstance(od, dict), "config.output", "must be an object")
    _check_keys(od, {"format", "normalization", "prefix"}, "config.output")
    fmt = od.get("format", "csv")
    _require(fmt in FORMATS, "config.output.format", f"must be one of {FORMATS}")
    norm = od.get("normalization", "raw")
    _require(norm in NORMALIZATIONS, "config.output.normalization",
             f"must be one of {NORMALIZATIONS}")
    prefix = od.get("prefix", "out/run")
    _require(isinstance(prefix, str) and prefix, "config.output.prefix",
             "must be a non-empty string")
    output = OutputConfig(format=fmt, normalization=norm, prefix=prefix)

    ad = data.get("analysis", {})
    _require(isinstance(ad, dict), "config.analysis", "must be an object")
    _check_keys(ad, {"peak_threshold", "min_separation", "fringe_axis",
                     "fringe_window", "blur_sigma"}, "config.analysis")
    fringe_axis = ad.get("fringe_axis")
    if fringe_axis is not None:
        _require(fringe_axis in ("x1", "x2", "t2"), "config.analysis.fringe_axis",
                 "must be 'x1', 'x2' or 't2'")
    analysis = AnalysisConfig(
        peak_threshold=_number(ad, "peak_threshold", "config.analysis",
                               required=False, default=0.15),
        min_separation=_integer(ad, "min_separation", "config.analysis",
                                required=False, default=3),
        fringe_axis=fringe_axis,
        fringe_window=_pair(ad, "fringe_window", "config.analysis",
                            required=False),
        blur_sigma=_number(ad, "blur_sigma", "config.analysis",
                           required=False, default=0.0))

    cd = data.get("coeffs")
    coeffs = None
    if cd is not None:
        _require(isinstance(cd, dict), "config.coeffs", "must be an object")
        _check_keys(cd, {"e_min", "e_max", "n"}, "config.coeffs")
        coeffs = CoeffsConfig(e_min=_number(cd, "e_min", "config.coeffs"),
                              e_max=_number(cd, "e_max", "config.coeffs"),
                              n=_integer(cd, "n", "config.coeffs",
                                         required=False, default=50))
        _require(0 < coeffs.e_min < coeffs.e_max, "config.coeffs",
                 "needs 0 < e_min < e_max")
        _require(coeffs.n >= 2, "config.coeffs.n", "must be >= 2")

    name = data.get("name")
    if name is not None:
        _require(isinstance(name, str), "config.name", "must be a string")

    return RunConfig(scenario=scenario, system=system, wavegroup=wavegroup,
                     grid=grid, times=times, output=output, analysis=analysis,
                     coeffs=coeffs, x1_fixed=x1_fixed, t1_fixed=t1_fixed,
                     name=name, raw=data)


def load_config(path: str | Path) -> RunConfig:
    """Read and validate a JSON run configuration."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: line {e.lineno}, column {e.colno}: {e.msg}") from e
    return parse_config(data)


# -- figure presets -----------------------------------------------------------

def _scattering_preset(name: str, *, v0_ratio: float, pe_sign: int,
                       ke_pe_ratio: float) -> dict:
    """Shared construction for the scattering-figure presets.

    Paper-cited ratios: dv/dV = 1.5, M/m = 5, v0/V0 per figure, and
    (KE_rel - PE)/|PE| per figure. Anchors m = 1, V0 = 1, dV = 0.25 V0;
    D = 0.9 keeps the central channel near a two-surface reflection maximum
    so the reflected peak is visible.
    """
    m, M = 1.0, 5.0
    V0 = 1.0
    v0 = v0_ratio * V0
    dV = 0.25 * V0
    dv = 1.5 * dV
    D = 0.9
    mu = m * M / (m + M)
    # (KE - PE)/|PE| = r  =>  PE = -KE/(r - 1) for wells (r > 1), +KE/(r + 1)
    # for barriers; both figures quote r against the mean relative energy.
    ke = 0.5 * mu * (v0 - V0) ** 2
    # fig1/fig4 family reuses the fig1 well depth so only speed varies
    ke_ref = 0.5 * mu * (6.0 * V0 - V0) ** 2
    if pe_sign < 0:
        pe = -ke_ref / (ke_pe_ratio - 1.0)
    else:
        pe = ke_ref / (ke_pe_ratio + 1.0)
    return {
        "name": name,
        "scenario": "finite-well" if pe_sign < 0 else "barrier",
        "system": {"m": m, "M": M, "pe": pe, "D": D},
        "wavegroup": {"v0": v0, "dv": dv, "V0": V0, "dV": dV,
                      "n_v": 64, "n_V": 64, "span": 4.0},
        "grid": {"x1": [-16.0, 18.0], "x2": [-7.0, 9.0], "n1": 200, "n2": 200,
                 "times": [-2.0, 0.0, 2.0]},
        "output": {"format": "csv", "normalization": "raw",
                   "prefix": f"out/{name}"},
        "analysis": {"peak_threshold": 0.15, "min_separation": 3,
                     "fringe_axis": "x1", "fringe_window": [-9.0, -1.1]},
    }


def _asynch_preset(name: str, v0_ratio: float) -> dict:
    cfg = _scattering_preset(name, v0_ratio=v0_ratio, pe_sign=-1,
                             ke_pe_ratio=1.4)
    cfg["grid"].update({"x1_fixed": -2.0, "t1_fixed": 0.0,
                        "t2": [0.0, 5.0], "n_t": 11,
                        "x2": [-4.0, 15.0], "n2": 191,
                        "times": [0.0]})
    cfg["analysis"].pop("fringe_axis")
    cfg["analysis"].pop("fringe_window")
    return cfg


def _well_preset(name: str, *, n0: int, single_mode: bool) -> dict:
    """Trapped-well presets: n0 and widths from the paper's ratios.

    Anchors m = 1, D = 1, V0 = 10 (V0 = 1 would make the cm spread
    hbar/(M_tot dV) exceed the well spacing, contradicting the narrow
    wavegroups the figures show).
    """
    m, M, D, V0 = 1.0, 10.0, 1.0, 10.0
    mu = m * M / (m + M)
    k_rel = n0 * math.pi / (2 * D)
    v_rel = k_rel / mu
    tau = D / v_rel
    if single_mode:
        vcm = (m * (V0 + v_rel) + M * V0) / (m + M)
        times = [0.0, round(D / vcm, 6), round(2 * D / vcm, 6)]
        grid = {"x1": [-1.6, 2.8], "x2": [-0.9, 1.9], "n1": 180, "n2": 150,
                "times": times}
    else:
        times = [round((k + 1) * tau, 9) for k in range(6)]
        grid = {"x1": [-1.7, 3.1], "x2": [-0.6, 2.1], "n1": 200, "n2": 160,
                "times": times}
    wavegroup = {"n0": float(n0), "dx": D / 15.0, "V0": V0, "dV": V0 / 30.0,
                 "n_V": 64, "span": 4.0}
    if single_mode:
        wavegroup["n_range"] = [1, 1]
    return {
        "name": name,
        "scenario": "infinite-well",
        "system": {"m": m, "M": M, "D": D},
        "wavegroup": wavegroup,
        "grid": grid,
        "output": {"format": "csv", "normalization": "raw",
                   "prefix": f"out/{name}"},
    }


def preset(name: str) -> RunConfig:
    """Named figure reproduction configs; parameters match the cited ratios."""
    builders = {
        "fig1": lambda: _scattering_preset("fig1", v0_ratio=6.0, pe_sign=-1,
                                           ke_pe_ratio=1.4),
        "fig2": lambda: _scattering_preset("fig2", v0_ratio=6.0, pe_sign=+1,
                                           ke_pe_ratio=0.3),
        "fig4a": lambda: _asynch_preset("fig4a", 4.6),
        "fig4b": lambda: _asynch_preset("fig4b", 6.1),
        "fig5": lambda: _well_preset("fig5", n0=50, single_mode=False),
        "fig6": lambda: _well_preset("fig6", n0=1, single_mode=True),
    }
    if name not in builders:
        raise ValidationError(
            f"unknown preset {name!r}; available: {sorted(builders)}")
    return parse_config(builders[name]())
