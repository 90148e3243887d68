"""Closed-form linear algebra for batches of 2x2 matrices.

LAPACK round trips dominate the runtime of per-interface work on fine
grids, so the few decompositions the solver needs are spelled out for the
2x2 case and vectorized over leading dimensions.
"""

from __future__ import annotations

import numpy as np


def sym_eig2(s11: np.ndarray, s12: np.ndarray, s22: np.ndarray):
    """Eigen-decomposition of symmetric 2x2 matrices.

    Returns (mu1, mu2, v1, v2) with mu1 >= mu2 and orthonormal eigenvectors
    stacked on the last axis.  For (near-)isotropic input the principal
    vector degenerates smoothly to e_x (atan2(0, 0) = 0).
    """
    half_tr = 0.5 * (s11 + s22)
    r = np.hypot(0.5 * (s11 - s22), s12)
    mu1 = half_tr + r
    mu2 = half_tr - r
    psi = 0.5 * np.arctan2(2.0 * s12, s11 - s22)
    c, s = np.cos(psi), np.sin(psi)
    v1 = np.stack([c, s], axis=-1)
    v2 = np.stack([-s, c], axis=-1)
    return mu1, mu2, v1, v2


def right_singular_frame(F: np.ndarray):
    """Singular values and right-singular vectors of 2x2 matrices.

    Returns (sig1, sig2, v1, v2), sig1 >= sig2 >= 0, from the eigenpairs of
    F^T F; no left factors are formed.
    """
    FtF11 = F[..., 0, 0] ** 2 + F[..., 1, 0] ** 2
    FtF22 = F[..., 0, 1] ** 2 + F[..., 1, 1] ** 2
    FtF12 = F[..., 0, 0] * F[..., 0, 1] + F[..., 1, 0] * F[..., 1, 1]
    mu1, mu2, v1, v2 = sym_eig2(FtF11, FtF12, FtF22)
    return np.sqrt(np.maximum(mu1, 0.0)), np.sqrt(np.maximum(mu2, 0.0)), v1, v2


def rescale_singular_values(F: np.ndarray, s1_new: np.ndarray,
                            s2_new: np.ndarray, sig1: np.ndarray,
                            sig2: np.ndarray, v1: np.ndarray, v2: np.ndarray
                            ) -> np.ndarray:
    """Rebuild F with its singular values replaced, factors untouched.

    Uses w_k = F v_k / sig_k, so orientation (the sign pattern of the left
    factors) is inherited from F itself.
    """
    w1 = np.einsum("...ij,...j->...i", F, v1) / sig1[..., None]
    w2 = np.einsum("...ij,...j->...i", F, v2) / sig2[..., None]
    return (s1_new[..., None, None] * w1[..., :, None] * v1[..., None, :]
            + s2_new[..., None, None] * w2[..., :, None] * v2[..., None, :])
