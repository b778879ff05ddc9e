"""Command-line surface.

Subcommands: coeffs (scattering-amplitude sweep), snapshot (synchronous PDF
grids), asynch (asynchronous slice), conserve (conservation residuals),
analyze (peak/fringe reports), preset (named figure reproduction).

Exit codes: 0 success, 2 configuration or usage error, 3 numerical error,
1 anything else. Grid files are written atomically; identical configs give
byte-identical output regardless of --threads.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import analysis as ana
from .config import (FORMATS, NORMALIZATIONS, PRESET_NAMES, RunConfig,
                     load_config, preset)
from .eigen import solve_coefficients
from .errors import ParseError, TooFewFringes, TwotimeError, ValidationError
from .field import GridSpec, asynchronous_slice, conservation_grid, snapshot_series
from .gridio import write_csv, write_pgm, write_summary
from .system import VelocityPair
from .wavegroup import BarrierWavegroup, WellWavegroup


def build_source(cfg: RunConfig):
    if cfg.scenario == "infinite-well":
        return WellWavegroup(cfg.wavegroup, cfg.system)
    return BarrierWavegroup(cfg.wavegroup, cfg.system)


def _emit(grid, stem: str, cfg: RunConfig, fmt: str):
    written = []
    if fmt in ("csv", "both"):
        path = Path(f"{stem}.csv")
        write_csv(grid, path, config_hash=cfg.physics_hash())
        written.append(str(path))
    if fmt in ("pgm", "both"):
        path = Path(f"{stem}.pgm")
        write_pgm(grid, path)
        written.append(str(path))
    for p in written:
        print(f"wrote {p}")
    return written


def _peak_list(peaks):
    return [{"location": list(p.location), "height": p.height, "width": p.width}
            for p in peaks]


def cmd_snapshot(cfg: RunConfig, args) -> dict:
    source = build_source(cfg)
    grids = snapshot_series(source, cfg.grid, cfg.times,
                            normalization=args.normalize, threads=args.threads)
    summary = {"command": "snapshot", "config": cfg.physics_hash(),
               "times": list(cfg.times), "snapshots": []}
    for i, (t, grid) in enumerate(zip(cfg.times, grids)):
        _emit(grid, f"{args.out}_snapshot_t{i}", cfg, args.format)
        peaks = ana.find_peaks(grid, cfg.analysis.peak_threshold,
                               cfg.analysis.min_separation)
        summary["snapshots"].append({"t": t, "peaks": _peak_list(peaks[:6])})
    return summary


def cmd_asynch(cfg: RunConfig, args) -> dict:
    if cfg.x1_fixed is None or cfg.t1_fixed is None or \
            not isinstance(cfg.grid.t2, tuple):
        raise ValidationError(
            "config.grid: asynch needs x1_fixed, t1_fixed, t2 range and n_t")
    source = build_source(cfg)
    grid = asynchronous_slice(source, cfg.x1_fixed, cfg.t1_fixed, cfg.grid,
                              normalization=args.normalize,
                              threads=args.threads)
    _emit(grid, f"{args.out}_asynch", cfg, args.format)
    rows = []
    for r, t2 in enumerate(grid.row_coords):
        peaks = ana.find_peaks(grid, cfg.analysis.peak_threshold,
                               cfg.analysis.min_separation, row=r)
        rows.append({"t2": float(t2), "peaks": _peak_list(peaks[:4])})
    vp = VelocityPair(getattr(cfg.wavegroup, "v0", 0.0), cfg.wavegroup.V0)
    v_out, V_out = ana.classical_recoil(vp, cfg.system)
    return {"command": "asynch", "config": cfg.physics_hash(),
            "x1": cfg.x1_fixed, "t1": cfg.t1_fixed, "rows": rows,
            "recoil_oracle": {"v_out": v_out, "V_out": V_out}}


def cmd_conserve(cfg: RunConfig, args) -> dict:
    source = build_source(cfg)
    entries = []
    worst = 0.0
    for i, t in enumerate(cfg.times):
        g = GridSpec(x1=cfg.grid.x1, x2=cfg.grid.x2, n1=cfg.grid.n1,
                     n2=cfg.grid.n2, t1=t, t2=t)
        grid, s = conservation_grid(source, g, h=args.fd_step,
                                    threads=args.threads)
        _emit(grid, f"{args.out}_residual_t{i}", cfg, args.format)
        entries.append(s)
        worst = max(worst, s["max_rel_residual"])
    return {"command": "conserve", "config": cfg.physics_hash(),
            "snapshots": entries, "max_rel_residual": worst}


def cmd_analyze(cfg: RunConfig, args) -> dict:
    source = build_source(cfg)
    threshold = args.peak_threshold if args.peak_threshold is not None \
        else cfg.analysis.peak_threshold
    grids = snapshot_series(source, cfg.grid, cfg.times,
                            normalization=args.normalize, threads=args.threads)
    report = {"command": "analyze", "config": cfg.physics_hash(),
              "snapshots": []}
    for t, grid in zip(cfg.times, grids):
        if cfg.analysis.blur_sigma > 0:
            grid = ana.smoothed(grid, cfg.analysis.blur_sigma)
        entry = {"t": t,
                 "peaks": _peak_list(ana.find_peaks(
                     grid, threshold, cfg.analysis.min_separation)[:6])}
        if cfg.analysis.fringe_axis and cfg.analysis.fringe_window:
            try:
                rep = ana.fringe_spacing(grid, cfg.analysis.fringe_axis,
                                         cfg.analysis.fringe_window)
                entry["fringes"] = {"mean_spacing": rep.mean_spacing,
                                    "spacing_stddev": rep.spacing_stddev,
                                    "count": rep.count}
            except TooFewFringes as e:
                entry["fringes"] = {"error": str(e)}
        report["snapshots"].append(entry)
    if cfg.scenario != "infinite-well":
        vp = VelocityPair(cfg.wavegroup.v0, cfg.wavegroup.V0)
        v_out, V_out = ana.classical_recoil(vp, cfg.system)
        report["recoil_oracle"] = {"v_out": v_out, "V_out": V_out}
    return report


def cmd_coeffs(cfg: RunConfig, args) -> dict:
    if cfg.scenario == "infinite-well":
        raise ValidationError("coeffs needs a barrier or finite-well scenario")
    if cfg.coeffs is not None:
        e = np.linspace(cfg.coeffs.e_min, cfg.coeffs.e_max, cfg.coeffs.n)
    else:
        scale = abs(cfg.system.pe)
        if scale == 0:
            mu = cfg.system.mu
            scale = 0.5 * mu * (cfg.wavegroup.v0 - cfg.wavegroup.V0) ** 2
        e = np.linspace(0.1 * scale, 3.0 * scale, 50)
    B, F, G, H, K1, K2 = solve_coefficients(e, cfg.system)[:6]
    open_ch = K2.imag == 0
    flux = np.where(open_ch,
                    K1 * (1 - np.abs(B) ** 2) - K1 * np.abs(H) ** 2,
                    K1 * (1 - np.abs(B) ** 2))
    path = Path(f"{args.out}_coeffs.csv")
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["# twotime coefficients v1",
             f"# config: {cfg.physics_hash()}",
             "e_rel,re_B,im_B,re_F,im_F,re_G,im_G,re_H,im_H,"
             "abs_B2,abs_H2,flux_defect"]
    for i in range(e.size):
        lines.append(",".join(f"{x:.12e}" for x in (
            e[i], B[i].real, B[i].imag, F[i].real, F[i].imag,
            G[i].real, G[i].imag, H[i].real, H[i].imag,
            abs(B[i]) ** 2, abs(H[i]) ** 2, flux[i])))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {path}")
    return {"command": "coeffs", "config": cfg.physics_hash(),
            "n_channels": int(e.size),
            "max_flux_defect": float(np.max(np.abs(flux)))}


def cmd_preset(cfg: RunConfig, args) -> dict:
    if cfg.x1_fixed is not None:
        return cmd_asynch(cfg, args)
    return cmd_snapshot(cfg, args)


_COMMANDS = {
    "coeffs": cmd_coeffs,
    "snapshot": cmd_snapshot,
    "asynch": cmd_asynch,
    "conserve": cmd_conserve,
    "analyze": cmd_analyze,
    "preset": cmd_preset,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twotime",
        description="Two-body two-time wavefunctions: joint PDFs for a "
                    "particle and a moving well or barrier.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("coeffs", "scattering coefficient table over a relative-energy sweep"),
        ("snapshot", "synchronous PDF grids at the configured times"),
        ("asynch", "asynchronous (x2, t2) slice at fixed particle coordinates"),
        ("conserve", "local conservation residual statistics"),
        ("analyze", "fringe/peak/recoil report for the configured grids"),
        ("preset", "reproduce a named figure configuration"),
    ]:
        p = sub.add_parser(name, help=help_text)
        if name == "preset":
            p.add_argument("name", choices=PRESET_NAMES)
        else:
            group = p.add_mutually_exclusive_group(required=True)
            group.add_argument("--config", help="path to a JSON run config")
            group.add_argument("--preset", choices=PRESET_NAMES,
                               help="use a built-in figure preset")
        p.add_argument("--out", help="output path prefix (default from config)")
        p.add_argument("--format", choices=FORMATS, default=None)
        p.add_argument("--normalize", choices=NORMALIZATIONS, default=None)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--fd-step", type=float, default=None,
                       help="finite-difference step for conservation checks")
        p.add_argument("--peak-threshold", type=float, default=None,
                       help="peak detection threshold (fraction of max)")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        if args.command == "preset":
            cfg = preset(args.name)
        elif args.config is not None:
            cfg = load_config(args.config)
        else:
            cfg = preset(args.preset)
        args.out = args.out or cfg.output.prefix
        args.format = args.format or cfg.output.format
        args.normalize = args.normalize or cfg.output.normalization
        if args.threads < 1:
            raise ValidationError("--threads must be >= 1")
        summary = _COMMANDS[args.command](cfg, args)
        spath = Path(f"{args.out}_summary.json")
        write_summary(summary, spath)
        print(f"wrote {spath}")
        return 0
    except (ParseError, ValidationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except TwotimeError as e:
        print(f"numerical error: {e}", file=sys.stderr)
        return 3
    except Exception as e:  # noqa: BLE001
        print(f"unexpected error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
