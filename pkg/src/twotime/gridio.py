"""Grid serialization: CSV and plain PGM, written atomically.

CSV carries '#'-prefixed header lines (kind, normalization, config hash,
axis metadata) followed by row-major data at %.12e, so output is diffable
and byte-stable across runs. PGM is plain P2 at 16-bit depth,
max-normalized. Files are written to a temporary sibling and renamed into
place, so readers never observe partial grids.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .field import FieldGrid


def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _axis_header(label: str, name: str, coords: np.ndarray) -> str:
    return (f"# {label}: {name} {coords[0]:.12e} {coords[-1]:.12e} "
            f"{coords.size}")


def write_csv(grid: FieldGrid, path: str | Path, config_hash: str = ""):
    path = Path(path)
    lines = ["# twotime grid v1",
             f"# kind: {grid.kind}",
             f"# normalization: {grid.normalization}",
             f"# config: {config_hash}"]
    for key, val in sorted((grid.meta or {}).items()):
        if isinstance(val, float):
            lines.append(f"# {key}: {val:.12e}")
        else:
            lines.append(f"# {key}: {val}")
    lines.append(_axis_header("rows", grid.row_name, grid.row_coords))
    lines.append(_axis_header("cols", grid.col_name, grid.col_coords))
    for row in grid.values:
        lines.append(",".join(f"{v:.12e}" for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def read_csv(path: str | Path) -> FieldGrid:
    """Parse a grid written by write_csv (used by the tests and demos)."""
    header: dict[str, str] = {}
    rows = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            body = line[1:].strip()
            if ":" in body:
                k, v = body.split(":", 1)
                header[k.strip()] = v.strip()
        elif line.strip():
            rows.append([float(tok) for tok in line.split(",")])
    values = np.asarray(rows)

    def axis(key):
        name, lo, hi, n = header[key].split()
        return name, np.linspace(float(lo), float(hi), int(n))

    row_name, row_coords = axis("rows")
    col_name, col_coords = axis("cols")
    return FieldGrid(values=values, row_name=row_name, row_coords=row_coords,
                     col_name=col_name, col_coords=col_coords,
                     kind=header.get("kind", "pdf"),
                     normalization=header.get("normalization", "raw"))


def write_pgm(grid: FieldGrid, path: str | Path):
    """Plain (P2) PGM heatmap, max-normalized to 16-bit depth."""
    path = Path(path)
    v = grid.values
    peak = float(v.max())
    scaled = np.zeros_like(v, dtype=np.int64) if peak <= 0 else \
        np.rint(v / peak * 65535).astype(np.int64)
    lines = ["P2", f"{v.shape[1]} {v.shape[0]}", "65535"]
    for row in scaled:
        lines.append(" ".join(str(int(x)) for x in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def read_pgm(path: str | Path) -> np.ndarray:
    tokens = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            continue
        tokens.extend(line.split())
    if tokens[0] != "P2":
        raise ValueError("not a plain PGM file")
    w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    data = np.array([int(t) for t in tokens[4:4 + w * h]]).reshape(h, w)
    if maxval != 65535:
        raise ValueError(f"expected 16-bit depth, got {maxval}")
    return data


def write_summary(summary: dict, path: str | Path):
    """Machine-readable run summary (sorted keys, stable formatting)."""
    _atomic_write(Path(path), json.dumps(summary, sort_keys=True, indent=2,
                                         default=float) + "\n")
