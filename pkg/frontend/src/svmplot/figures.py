"""Figure builders: slice panels, depth surface, velocity quiver, energy."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .readers import read_energy, read_slice, read_snapshot

SLICE_PANELS = ("H", "Ux", "Bzz", "Bxx")
MAX_ARROWS = 64


def plot_slices(paths: list[str], out: str, labels: list[str] | None = None) -> str:
    """4-panel profile figure (H, Ux, Bzz, Bxx), one curve per input file."""
    tables = [read_slice(p) for p in paths]
    if labels is None:
        labels = [str(p) for p in paths]
    fig, axes = plt.subplots(2, 2, figsize=(10, 7), sharex=True)
    for name, ax in zip(SLICE_PANELS, axes.flat):
        for table, label in zip(tables, labels):
            ax.plot(table["position"], table[name], lw=1.2, label=label)
        ax.set_ylabel(name)
        ax.grid(alpha=0.3)
    for ax in axes[-1]:
        ax.set_xlabel("position")
    axes.flat[0].legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out, dpi=130)
    plt.close(fig)
    return out


def plot_surface(path: str, out: str) -> str:
    """3D-style surface of the depth field from one snapshot."""
    snap = read_snapshot(path)
    x, y = np.unique(snap["x"]), np.unique(snap["y"])
    H = snap["H"].reshape(len(x), len(y))
    X, Y = np.meshgrid(x, y, indexing="ij")
    fig = plt.figure(figsize=(7, 5))
    ax = fig.add_subplot(projection="3d")
    ax.plot_surface(X, Y, H, cmap="viridis", linewidth=0, antialiased=False)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_zlabel("H")
    fig.tight_layout()
    fig.savefig(out, dpi=130)
    plt.close(fig)
    return out


def plot_vector_field(path: str, out: str) -> str:
    """Quiver of (Ux, Uy) at cell centers, subsampled to <= 64 x 64 arrows."""
    snap = read_snapshot(path)
    x, y = np.unique(snap["x"]), np.unique(snap["y"])
    nx, ny = len(x), len(y)
    Ux = snap["Ux"].reshape(nx, ny)
    Uy = snap["Uy"].reshape(nx, ny)
    sx = max(1, int(np.ceil(nx / MAX_ARROWS)))
    sy = max(1, int(np.ceil(ny / MAX_ARROWS)))
    X, Y = np.meshgrid(x[::sx], y[::sy], indexing="ij")
    fig, ax = plt.subplots(figsize=(7, 6))
    # an explicit scale keeps matplotlib's autoscaling away from all-zero fields
    scale = None if np.max(np.hypot(Ux, Uy)) > 0 else 1.0
    ax.quiver(X, Y, Ux[::sx, ::sy], Uy[::sx, ::sy], angles="xy", scale=scale)
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    fig.tight_layout()
    fig.savefig(out, dpi=130)
    plt.close(fig)
    return out


def quiver_subsample_counts(nx: int, ny: int) -> tuple[int, int]:
    """Arrow counts after decimation (exposed for testing the contract)."""
    sx = max(1, int(np.ceil(nx / MAX_ARROWS)))
    sy = max(1, int(np.ceil(ny / MAX_ARROWS)))
    return len(range(0, nx, sx)), len(range(0, ny, sy))


def energy_violations(t: np.ndarray, E: np.ndarray) -> np.ndarray:
    """Indices where the total energy increased from the previous step."""
    rising = np.nonzero(np.diff(E) > 1e-12 * np.maximum(1.0, np.abs(E[:-1])))[0]
    return rising + 1


def plot_energy(path: str, out: str) -> str:
    """Total free energy vs time with the dissipation overlay.

    Steps where the energy rose are highlighted; a dissipative run shows
    none.
    """
    series = read_energy(path)
    t, E = series["t"], series["E_total"]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(t, E, lw=1.4, label="total free energy")
    bad = energy_violations(t, E)
    if bad.size:
        ax.plot(t[bad], E[bad], "rv", ms=6, label="energy increase")
    ax2 = ax.twinx()
    ax2.plot(t, series["dissipation"], lw=1.0, color="tab:orange",
             label="dissipation rate")
    ax2.set_ylabel("dissipation rate")
    ax.set_xlabel("t")
    ax.set_ylabel("E total")
    ax.grid(alpha=0.3)
    lines, labels = ax.get_legend_handles_labels()
    l2, lab2 = ax2.get_legend_handles_labels()
    ax.legend(lines + l2, labels + lab2, fontsize=8)
    fig.tight_layout()
    fig.savefig(out, dpi=130)
    plt.close(fig)
    return out
