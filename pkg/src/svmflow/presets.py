"""The four reference experiments.

1. dam break aligned with the grid (translation-invariant in y),
2. the same dam break rotated by pi/4,
3. collapse of a cylindrical column (rotation-invariant),
4. lid-driven cavity run to a stationary sheared state.

Cases 1-3 start at rest with the distortion at relaxation equilibrium
(A = F^-1 F^-T, A_cc = H^-2) so the initial source vanishes; their
boundaries are outflow (copy).  Case 4 prescribes steady boundary states
with the lid at x = 0 moving tangentially.
"""

from __future__ import annotations

import numpy as np

from .config import SimConfig
from .fv2d import BoundaryCondition, FieldState, Grid2D, hold_boundary_cells
from .params import PhysicalParams
from .state import CellState, inv2, primitive_to_conserved

PRESET_IDS = ("1", "2", "3", "4")

#: case 4 boundary tuples (H, Fxa, Fya, Fxb, Fyb, Ux, Uy)
CAVITY_LID = (1.0, 1.0, 1.0, 0.0, 1.0, 0.0, 1.0)
CAVITY_WALL = (1.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0)


def ghost_from_tuple(values: tuple[float, ...]) -> np.ndarray:
    """Conserved ghost state from (H, Fxa, Fya, Fxb, Fyb, Ux, Uy).

    The distortion is set to its relaxation equilibrium so that the ghost
    cell carries no source.
    """
    H, fxa, fya, fxb, fyb, ux, uy = values
    F = np.array([[fxa, fxb], [fya, fyb]])
    Finv = inv2(F)
    state = CellState(H=H, U=[ux, uy], F=F, A=Finv @ Finv.T, A_cc=1.0 / H ** 2)
    return primitive_to_conserved(state)


def default_config(case: str) -> SimConfig:
    if case not in PRESET_IDS:
        raise ValueError(f"unknown preset {case!r}; valid: 1, 2, 3, 4")
    cfg = SimConfig(case=case)
    cfg.t_end = 10.0 if case == "4" else 0.2
    return cfg


def _equilibrium_from_F(H: np.ndarray, F: np.ndarray) -> CellState:
    Finv = inv2(F)
    return CellState(H=H, U=np.zeros(H.shape + (2,)), F=F,
                     A=Finv @ np.swapaxes(Finv, -1, -2), A_cc=1.0 / H ** 2)


def build_initial(cfg: SimConfig) -> tuple[Grid2D, FieldState]:
    """Grid and admissible initial field for a configuration."""
    grid = Grid2D(nx=cfg.nx, ny=cfg.ny,
                  dx=(cfg.xmax - cfg.xmin) / cfg.nx,
                  dy=(cfg.ymax - cfg.ymin) / cfg.ny,
                  x0=cfg.xmin, y0=cfg.ymin)
    X, Y = grid.cell_centers()

    if cfg.case == "custom":
        H = np.full(X.shape, cfg.h0)
        state = _equilibrium_from_F(H, np.broadcast_to(np.eye(2),
                                                       X.shape + (2, 2)).copy())
        state.U = np.broadcast_to(np.array([cfg.ux0, cfg.uy0]),
                                  X.shape + (2,)).copy()
        return grid, FieldState(primitive_to_conserved(state))

    if cfg.case == "1":
        H = np.where(X < 0.5 * (cfg.xmin + cfg.xmax), 3.0, 1.0)
        F = np.zeros(X.shape + (2, 2))
        F[..., 0, 0] = 1.0 / H
        F[..., 1, 1] = 1.0
        state = _equilibrium_from_F(H, F)

    elif cfg.case == "2":
        xc = 0.5 * (cfg.xmin + cfg.xmax)
        yc = 0.5 * (cfg.ymin + cfg.ymax)
        H = np.where((X - xc) + (Y - yc) < 0.0, 3.0, 1.0)
        F1 = np.zeros(X.shape + (2, 2))
        F1[..., 0, 0] = 1.0 / H
        F1[..., 1, 1] = 1.0
        r = np.sqrt(0.5)
        R = np.array([[r, -r], [r, r]])
        state = _equilibrium_from_F(H, R @ F1 @ R.T)

    elif cfg.case == "3":
        xc = 0.5 * (cfg.xmin + cfg.xmax)
        yc = 0.5 * (cfg.ymin + cfg.ymax)
        rr = np.sqrt((X - xc) ** 2 + (Y - yc) ** 2)
        H = np.where(rr < 1.0, 3.0, 1.0)
        er = np.stack([X - xc, Y - yc], axis=-1) / rr[..., None]
        et = np.stack([-er[..., 1], er[..., 0]], axis=-1)
        F = (er[..., :, None] * er[..., None, :] / H[..., None, None]
             + et[..., :, None] * et[..., None, :])
        state = _equilibrium_from_F(H, F)

    elif cfg.case == "4":
        state = _equilibrium_from_F(np.ones(X.shape),
                                    np.broadcast_to(np.eye(2),
                                                    X.shape + (2, 2)).copy())
        # steady values are imposed at the boundary cells themselves,
        # which pins the corners where the lid prescription meets the
        # walls
        grid.bc["left"] = BoundaryCondition("fixed", ghost_from_tuple(CAVITY_LID),
                                            hold_cells=True)
        for side in ("right", "bottom", "top"):
            grid.bc[side] = BoundaryCondition("fixed",
                                              ghost_from_tuple(CAVITY_WALL),
                                              hold_cells=True)
    else:
        raise ValueError(f"unknown case {cfg.case!r}")

    fs = FieldState(primitive_to_conserved(state))
    hold_boundary_cells(fs, grid)
    return grid, fs


def preset_case(case: str, nx: int | None = None, ny: int | None = None
                ) -> tuple[SimConfig, Grid2D, FieldState]:
    """Defaults plus the initial field of one reference experiment."""
    cfg = default_config(case)
    if nx:
        cfg.nx = nx
    if ny:
        cfg.ny = ny
    cfg.validate()
    grid, fs = build_initial(cfg)
    return cfg, grid, fs
