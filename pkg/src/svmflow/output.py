"""Snapshot, slice and energy-series files.

Snapshot CSV columns (fixed order, %.12e formatting):

    x, y, H, Ux, Uy, Fxa, Fya, Fxb, Fyb, Aaa, Aab, Abb, Acc,
    Bxx, Bxy, Byy, Bzz, E

Slice CSV columns:

    position, H, Ux, Uy, Bzz, Bxx, Bxy, Byy, E

Energy series CSV columns:

    step, t, dt, E_total, boundary_flux, dissipation, residual

The optional VTK output is legacy ASCII STRUCTURED_POINTS with the same
scalars plus the velocity as a vector field, one point per cell center.
"""

from __future__ import annotations

import os

import numpy as np

from .fv2d import EnergyLedger, FieldState, Grid2D
from .params import PhysicalParams
from .state import free_energy, strain_from_state

SNAPSHOT_COLUMNS = (
    "x", "y", "H", "Ux", "Uy", "Fxa", "Fya", "Fxb", "Fyb",
    "Aaa", "Aab", "Abb", "Acc", "Bxx", "Bxy", "Byy", "Bzz", "E",
)
SLICE_COLUMNS = ("position", "H", "Ux", "Uy", "Bzz", "Bxx", "Bxy", "Byy", "E")
ENERGY_COLUMNS = ("step", "t", "dt", "E_total", "boundary_flux",
                  "dissipation", "residual")

_FMT = "%.12e"


class SnapshotSchemaError(ValueError):
    """A CSV file does not carry the documented columns."""


def snapshot_table(fs: FieldState, grid: Grid2D, p: PhysicalParams) -> np.ndarray:
    """Per-cell values in snapshot column order, shape (nx*ny, ncols)."""
    s = fs.primitives()
    st = strain_from_state(s)
    X, Y = grid.cell_centers()
    cols = [
        X, Y, s.H, s.U[..., 0], s.U[..., 1],
        s.F[..., 0, 0], s.F[..., 1, 0], s.F[..., 0, 1], s.F[..., 1, 1],
        s.A[..., 0, 0], s.A[..., 0, 1], s.A[..., 1, 1], s.A_cc,
        st.B[..., 0, 0], st.B[..., 0, 1], st.B[..., 1, 1], st.B_zz,
        free_energy(s, p),
    ]
    return np.stack([c.reshape(-1) for c in cols], axis=-1)


def write_snapshot(fs: FieldState, grid: Grid2D, p: PhysicalParams,
                   path: str, vtk: bool = False) -> list[str]:
    """Write one snapshot CSV (and optionally its VTK twin); returns paths."""
    table = snapshot_table(fs, grid, p)
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(SNAPSHOT_COLUMNS) + "\n")
        np.savetxt(fh, table, fmt=_FMT, delimiter=",")
    written = [path]
    if vtk:
        vtk_path = os.path.splitext(path)[0] + ".vtk"
        write_vtk(fs, grid, p, vtk_path)
        written.append(vtk_path)
    return written


def read_snapshot(path: str) -> dict[str, np.ndarray]:
    """Read a snapshot CSV back as named columns (schema-checked)."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    missing = [c for c in SNAPSHOT_COLUMNS if c not in header]
    if missing:
        raise SnapshotSchemaError(f"snapshot {path} missing columns: {missing}")
    return {name: data[:, header.index(name)] for name in header}


def write_vtk(fs: FieldState, grid: Grid2D, p: PhysicalParams, path: str) -> None:
    """Legacy ASCII STRUCTURED_POINTS file with cell-center point data."""
    table = snapshot_table(fs, grid, p)
    nx, ny = grid.nx, grid.ny

    def vtk_order(col: np.ndarray) -> np.ndarray:
        # VTK iterates x fastest; our flattening is x-major
        return col.reshape(nx, ny).flatten(order="F")

    names = SNAPSHOT_COLUMNS
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# vtk DataFile Version 2.0\n")
        fh.write("viscoelastic shallow-water snapshot\n")
        fh.write("ASCII\n")
        fh.write("DATASET STRUCTURED_POINTS\n")
        fh.write(f"DIMENSIONS {nx} {ny} 1\n")
        fh.write(f"ORIGIN {grid.x0 + 0.5 * grid.dx} {grid.y0 + 0.5 * grid.dy} 0\n")
        fh.write(f"SPACING {grid.dx} {grid.dy} 1\n")
        fh.write(f"POINT_DATA {nx * ny}\n")
        for name in ("H", "Acc", "Bxx", "Bxy", "Byy", "Bzz", "E"):
            col = vtk_order(table[:, names.index(name)])
            fh.write(f"SCALARS {name} double 1\nLOOKUP_TABLE default\n")
            np.savetxt(fh, col, fmt=_FMT)
        ux = vtk_order(table[:, names.index("Ux")])
        uy = vtk_order(table[:, names.index("Uy")])
        fh.write("VECTORS U double\n")
        np.savetxt(fh, np.stack([ux, uy, np.zeros_like(ux)], axis=-1), fmt=_FMT)


def extract_slice(fs: FieldState, grid: Grid2D, p: PhysicalParams,
                  axis: str, coord: float) -> np.ndarray:
    """Nearest row/column profile with ``axis`` held fixed at ``coord``."""
    if axis == "y":
        lo, hi = grid.y0, grid.y0 + grid.ny * grid.dy
    elif axis == "x":
        lo, hi = grid.x0, grid.x0 + grid.nx * grid.dx
    else:
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    if not lo <= coord <= hi:
        raise ValueError(f"slice coordinate {coord} outside [{lo}, {hi}]")

    s = fs.primitives()
    st = strain_from_state(s)
    X, Y = grid.cell_centers()
    if axis == "y":
        j = int(np.clip(round((coord - grid.y0) / grid.dy - 0.5), 0, grid.ny - 1))
        sel = (slice(None), j)
        pos = X[:, j]
    else:
        i = int(np.clip(round((coord - grid.x0) / grid.dx - 0.5), 0, grid.nx - 1))
        sel = (i, slice(None))
        pos = Y[i, :]
    cols = [pos, s.H[sel], s.U[..., 0][sel], s.U[..., 1][sel], st.B_zz[sel],
            st.B[..., 0, 0][sel], st.B[..., 0, 1][sel], st.B[..., 1, 1][sel],
            free_energy(s, p)[sel]]
    return np.stack(cols, axis=-1)


def slice_from_snapshot(columns: dict[str, np.ndarray], axis: str,
                        coord: float) -> np.ndarray:
    """Slice an already-written snapshot (CLI path)."""
    if axis not in ("x", "y"):
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    fixed = columns[axis]
    levels = np.unique(fixed)
    if not levels[0] - 1e-12 <= coord <= levels[-1] + 1e-12:
        raise ValueError(f"slice coordinate {coord} outside data range")
    nearest = levels[np.argmin(np.abs(levels - coord))]
    mask = fixed == nearest
    other = "y" if axis == "x" else "x"
    order = np.argsort(columns[other][mask])
    cols = [columns[other][mask][order]]
    for name in ("H", "Ux", "Uy", "Bzz", "Bxx", "Bxy", "Byy", "E"):
        cols.append(columns[name][mask][order])
    return np.stack(cols, axis=-1)


def write_slice(table: np.ndarray, path: str) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(SLICE_COLUMNS) + "\n")
        np.savetxt(fh, table, fmt=_FMT, delimiter=",")


def write_energy_series(ledger: EnergyLedger, path: str) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(ENERGY_COLUMNS) + "\n")
        for e in ledger.entries:
            row = (e.step, e.t, e.dt, e.E_total, e.boundary_flux,
                   e.dissipation, e.residual)
            fh.write(f"{e.step:d}," + ",".join(_FMT % v for v in row[1:]) + "\n")
