"""Schema-checked readers for the solver's CSV outputs.

These scripts are read-only consumers of the documented file formats; a
renamed or missing column fails loudly with the column named, never
silently.
"""

from __future__ import annotations

import glob as globmod

import numpy as np

SNAPSHOT_COLUMNS = (
    "x", "y", "H", "Ux", "Uy", "Fxa", "Fya", "Fxb", "Fyb",
    "Aaa", "Aab", "Abb", "Acc", "Bxx", "Bxy", "Byy", "Bzz", "E",
)
SLICE_COLUMNS = ("position", "H", "Ux", "Uy", "Bzz", "Bxx", "Bxy", "Byy", "E")
ENERGY_COLUMNS = ("step", "t", "dt", "E_total", "boundary_flux",
                  "dissipation", "residual")


class SchemaError(ValueError):
    """A CSV file does not match the documented schema."""


def read_csv(path: str, required: tuple[str, ...]) -> dict[str, np.ndarray]:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    missing = [c for c in required if c not in header]
    if missing:
        raise SchemaError(f"{path}: missing column(s) {', '.join(missing)}")
    if data.shape[1] != len(header):
        raise SchemaError(f"{path}: {data.shape[1]} data columns for "
                          f"{len(header)} header names")
    return {name: data[:, k] for k, name in enumerate(header)}


def read_snapshot(path: str) -> dict[str, np.ndarray]:
    return read_csv(path, SNAPSHOT_COLUMNS)


def read_slice(path: str) -> dict[str, np.ndarray]:
    return read_csv(path, SLICE_COLUMNS)


def read_energy(path: str) -> dict[str, np.ndarray]:
    return read_csv(path, ENERGY_COLUMNS)


def expand(pattern: str) -> list[str]:
    paths = sorted(globmod.glob(pattern))
    if not paths:
        raise FileNotFoundError(f"no files match {pattern!r}")
    return paths
