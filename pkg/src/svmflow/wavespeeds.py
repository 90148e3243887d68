"""Characteristic speeds and hyperbolicity margins.

For 1D waves along a unit direction n the upper-convected model has the
seven characteristic speeds

    u,  u (x3 total),  u +- sqrt(G * B_nn),  u +- sqrt(g H + 3 G B_zz + G B_nn)

with u = U.n and B_nn = n.B.n.  The Gordon-Schowalter family (slip parameter
zeta > 0) loses realness of its speeds on part of the admissible domain; the
strain-parametrized margin below quantifies this.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import PhysicalParams
from .state import CellState, strain_from_state


@dataclass
class EigenReport:
    """Eigenvalues of the 1D quasilinear system along one direction."""

    eigenvalues: np.ndarray     # (..., 7), sorted ascending
    multiplicities: tuple[int, ...]
    hyperbolic: bool
    margin: float               # min radicand; >= 0 certifies real speeds


def _normal_strain(s: CellState, n: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    st = strain_from_state(s)
    n = np.asarray(n, dtype=float)
    B_nn = np.einsum("...i,...ij,...j->...", n, st.B, n)
    u_n = np.sum(s.U * n, axis=-1)
    return u_n, B_nn, st.B_zz


def svucm_eigenvalues_1d(s: CellState, n: np.ndarray, p: PhysicalParams) -> EigenReport:
    """Seven characteristic speeds in the frame aligned with n (zeta = 0)."""
    u_n, B_nn, B_zz = _normal_strain(s, n)
    r_shear = p.G * B_nn
    r_press = p.g * s.H + 3.0 * p.G * B_zz + p.G * B_nn
    margin = float(np.min(np.minimum(r_shear, r_press)))
    hyperbolic = margin >= 0.0
    c_s = np.sqrt(np.maximum(r_shear, 0.0))
    c_p = np.sqrt(np.maximum(r_press, 0.0))
    lams = np.stack([u_n - c_p, u_n - c_s, u_n, u_n, u_n, u_n + c_s, u_n + c_p],
                    axis=-1)
    return EigenReport(eigenvalues=np.sort(lams, axis=-1),
                       multiplicities=(1, 1, 3, 1, 1),
                       hyperbolic=hyperbolic,
                       margin=margin)


def gs_hyperbolicity_margin(s: CellState, p: PhysicalParams) -> np.ndarray:
    """Margin of the realness condition for the Gordon-Schowalter speeds.

    With Delta = 2 g H + G (2(3 - 2 zeta) B_zz + zeta B_yy - 3 zeta B_xx)
    and S = 4 B_xx - 2 zeta (B_xx + B_yy), the four nontrivial speeds are
    real iff

        G^2 (4 zeta B_xy)^2  <=  2 G Delta S + G^2 S^2.

    Returns RHS - LHS; nonnegativity certifies real eigenvalues (for the
    x-aligned 1D projection) wherever Delta + G S >= 0, which always holds
    at zeta = 0 where the left side also vanishes.  A negative margin
    implies complex speeds unconditionally.
    """
    st = strain_from_state(s)
    B = st.B
    z = p.zeta
    delta = 2.0 * p.g * s.H + p.G * (2.0 * (3.0 - 2.0 * z) * st.B_zz
                                     + z * B[..., 1, 1] - 3.0 * z * B[..., 0, 0])
    S = 4.0 * B[..., 0, 0] - 2.0 * z * (B[..., 0, 0] + B[..., 1, 1])
    lhs = (p.G * 4.0 * z * B[..., 0, 1]) ** 2
    rhs = 2.0 * p.G * delta * S + (p.G * S) ** 2
    return rhs - lhs


def characteristic_bound(s: CellState, n: np.ndarray, p: PhysicalParams) -> np.ndarray:
    """Conservative upper bound on |eigenvalue| along n, used to pre-size CFL."""
    u_n, B_nn, B_zz = _normal_strain(s, n)
    return np.abs(u_n) + np.sqrt(p.g * s.H + 3.0 * p.G * B_zz + p.G * B_nn)
