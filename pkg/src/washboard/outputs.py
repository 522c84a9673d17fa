"""Deterministic CSV emission.

Dialect: comma separator, '.' decimal point, LF line endings, one header
row, numbers serialised with 17 significant digits so files round-trip
exactly.  Every file embeds the resolved parameter set and tool version
as leading '# key = value' comment lines; a wall-clock stamp is added
unless the run is marked deterministic.
"""

from __future__ import annotations

import datetime
import os
from typing import Iterable

import numpy as np

from . import __version__


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if value is None:
        return "none"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def metadata_lines(meta: dict, deterministic: bool) -> list[str]:
    lines = [f"# version = {__version__}"]
    if not deterministic:
        lines.append(f"# generated = {datetime.datetime.now().isoformat()}")
    for key in sorted(meta):
        lines.append(f"# {key} = {fmt(meta[key])}")
    return lines


def write_csv(
    path: str,
    columns: Iterable[tuple[str, np.ndarray]],
    meta: dict,
    deterministic: bool = False,
) -> str:
    """Write a long-form CSV with metadata header; returns the path."""
    columns = list(columns)
    names = [name for name, _ in columns]
    arrays = [np.asarray(arr) for _, arr in columns]
    n = arrays[0].size if arrays else 0
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in metadata_lines(meta, deterministic):
            fh.write(line + "\n")
        fh.write(",".join(names) + "\n")
        for i in range(n):
            fh.write(",".join(fmt(arr[i]) for arr in arrays) + "\n")
    return path


def write_wigner_csv(path: str, grid, meta: dict, deterministic: bool = False) -> str:
    """Long-form (gamma, N, W_s) rows, gamma as the outer loop."""
    gg, nn = np.meshgrid(grid.gamma_axis, grid.n_axis, indexing="ij")
    cols = [
        ("gamma", gg.ravel()),
        ("N", nn.ravel()),
        ("w_s", grid.values.ravel()),
    ]
    full_meta = dict(meta)
    full_meta.update({f"grid_{k}": v for k, v in grid.metadata.items()})
    full_meta["gamma_points"] = grid.gamma_axis.size
    full_meta["n_points"] = grid.n_axis.size
    return write_csv(path, cols, full_meta, deterministic)
