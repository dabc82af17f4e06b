"""Line-oriented text formats for grids and scalar fields.

Grid files:   header ``DIFFAVG-GRID 1 <nx> <ny>`` followed by nx*ny lines
              ``<i> <j> <x> <y>`` in row-major order (i outer).
Field files:  header ``DIFFAVG-FIELD 1 <nx> <ny>`` and lines ``<i> <j> <v>``.

Coordinates are printed with 17 significant digits, so write/read round
trips are bit-exact for finite doubles.  Readers validate the header, the
node count and order, finiteness, and (for grids) the identity boundary,
reporting the offending node.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .errors import GridFileError
from .grids import DomainSpec, GridTransform, ScalarField

GRID_MAGIC = "DIFFAVG-GRID"
FIELD_MAGIC = "DIFFAVG-FIELD"
FORMAT_VERSION = 1


def _fmt(x: float) -> str:
    return format(x, ".17g")


def _parse_header(line: str, magic: str, path: str) -> tuple[int, int]:
    parts = line.split()
    if len(parts) != 4 or parts[0] != magic:
        raise GridFileError(f"{path}: malformed header {line!r}, expected '{magic} 1 <nx> <ny>'")
    try:
        version, nx, ny = int(parts[1]), int(parts[2]), int(parts[3])
    except ValueError:
        raise GridFileError(f"{path}: malformed header {line!r}") from None
    if version != FORMAT_VERSION:
        raise GridFileError(f"{path}: unsupported format version {version}")
    if nx < 3 or ny < 3:
        raise GridFileError(f"{path}: node counts {nx}x{ny} below the 3x3 minimum")
    return nx, ny


def _parse_rows(lines: list[str], nx: int, ny: int, ncols: int, path: str) -> np.ndarray:
    expected = nx * ny
    if len(lines) != expected:
        raise GridFileError(
            f"{path}: header claims {nx}x{ny} = {expected} nodes but file has "
            f"{len(lines)} data rows"
        )
    out = np.empty((nx, ny, ncols - 2))
    for k, line in enumerate(lines):
        parts = line.split()
        if len(parts) != ncols:
            raise GridFileError(f"{path}: row {k + 1} has {len(parts)} columns, expected {ncols}")
        try:
            i, j = int(parts[0]), int(parts[1])
            vals = [float(p) for p in parts[2:]]
        except ValueError:
            raise GridFileError(f"{path}: row {k + 1} is not numeric: {line!r}") from None
        if (i, j) != divmod(k, ny):
            raise GridFileError(
                f"{path}: row {k + 1} carries node ({i}, {j}) but row-major order "
                f"expects {divmod(k, ny)}"
            )
        for v in vals:
            if not math.isfinite(v):
                raise GridFileError(f"{path}: non-finite value at row {k + 1}, node ({i}, {j})")
        out[i, j] = vals
    return out


def write_grid(g: GridTransform, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="ascii") as f:
        f.write(f"{GRID_MAGIC} {FORMAT_VERSION} {g.spec.nx} {g.spec.ny}\n")
        for i in range(g.spec.nx):
            for j in range(g.spec.ny):
                x, y = g.coords[i, j]
                f.write(f"{i} {j} {_fmt(x)} {_fmt(y)}\n")


def read_grid(path: str | Path) -> GridTransform:
    path = Path(path)
    lines = path.read_text(encoding="ascii").splitlines()
    if not lines:
        raise GridFileError(f"{path}: empty file")
    nx, ny = _parse_header(lines[0], GRID_MAGIC, str(path))
    coords = _parse_rows(lines[1:], nx, ny, 4, str(path))
    spec = DomainSpec(nx, ny)
    g = GridTransform(spec, coords, pin_boundary=False)
    if not g.has_identity_boundary:
        ident = spec.identity_coords()
        mask = spec.boundary_mask()
        bad = np.argwhere(mask & np.any(g.coords != ident, axis=-1))
        i, j = bad[0]
        raise GridFileError(
            f"{path}: boundary node ({i}, {j}) deviates from its identity position"
        )
    return g


def write_field(f: ScalarField, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="ascii") as out:
        out.write(f"{FIELD_MAGIC} {FORMAT_VERSION} {f.spec.nx} {f.spec.ny}\n")
        for i in range(f.spec.nx):
            for j in range(f.spec.ny):
                out.write(f"{i} {j} {_fmt(f.values[i, j])}\n")


def read_field(path: str | Path) -> ScalarField:
    path = Path(path)
    lines = path.read_text(encoding="ascii").splitlines()
    if not lines:
        raise GridFileError(f"{path}: empty file")
    nx, ny = _parse_header(lines[0], FIELD_MAGIC, str(path))
    values = _parse_rows(lines[1:], nx, ny, 3, str(path))
    return ScalarField(DomainSpec(nx, ny), values[:, :, 0])
