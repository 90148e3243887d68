"""Flow state, conservative variables, energies and admissibility.

The state of one fluid column is (H, U, F, A, A_cc):

* ``H``     water depth,
* ``U``     horizontal velocity, shape (..., 2),
* ``F``     in-plane deformation gradient, shape (..., 2, 2); ``F[..., i, a]``
  maps the material axis ``a`` (reference configuration) to the spatial
  direction ``i`` (current configuration),
* ``A``     symmetric positive-definite material distortion, shape (..., 2, 2),
* ``A_cc``  vertical material distortion, > 0.

All operations broadcast over leading batch dimensions, so the same code
serves scalar sanity checks and whole-grid updates.

The conservative vector has 11 components in the fixed order

    (H, H*Ux, H*Uy, H*Fxa, H*Fya, H*Fxb, H*Fyb,
     H*Aaa, H*Aab, H*Abb, H*Acc).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .params import PhysicalParams

#: Depth below which a state counts as vacuum.
H_FLOOR = 1e-12
#: |det F| below which the deformation counts as singular.
DET_FLOOR = 1e-12

N_CONSERVED = 11


class AdmissibilityError(ValueError):
    """A state violates one of the pointwise invariants."""


class VacuumError(AdmissibilityError):
    """Depth at or below the vacuum floor."""


class SingularDeformationError(AdmissibilityError):
    """|det F| at or below the singularity floor."""


@dataclass
class CellState:
    """Primitive state of one (or a batch of) fluid column(s)."""

    H: np.ndarray
    U: np.ndarray
    F: np.ndarray
    A: np.ndarray
    A_cc: np.ndarray

    def __post_init__(self) -> None:
        self.H = np.asarray(self.H, dtype=float)
        self.U = np.asarray(self.U, dtype=float)
        self.F = np.asarray(self.F, dtype=float)
        self.A = np.asarray(self.A, dtype=float)
        self.A_cc = np.asarray(self.A_cc, dtype=float)

    @classmethod
    def identity(cls, shape: tuple[int, ...] = ()) -> "CellState":
        """Rest state with H = 1, F = A = I, A_cc = 1."""
        eye = np.broadcast_to(np.eye(2), shape + (2, 2)).copy()
        return cls(
            H=np.ones(shape),
            U=np.zeros(shape + (2,)),
            F=eye.copy(),
            A=eye.copy(),
            A_cc=np.ones(shape),
        )

    def copy(self) -> "CellState":
        return CellState(self.H.copy(), self.U.copy(), self.F.copy(),
                         self.A.copy(), self.A_cc.copy())


@dataclass
class StrainState:
    """Spatial strain B = F A F^T and vertical strain B_zz = H^2 A_cc."""

    B: np.ndarray
    B_zz: np.ndarray


@dataclass
class AdmissibilityReport:
    """Outcome of :func:`check_admissible` (pure diagnostic, never raises)."""

    ok: bool
    violations: list[str] = field(default_factory=list)
    involution_drift: float | np.ndarray = 0.0

    def __iter__(self) -> Iterator[str]:
        return iter(self.violations)


def det2(M: np.ndarray) -> np.ndarray:
    """Determinant of a batch of 2x2 matrices (no LAPACK round trip)."""
    return M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]


def inv2(M: np.ndarray, floor: float = DET_FLOOR) -> np.ndarray:
    """Inverse of a batch of 2x2 matrices, guarding singular ones."""
    d = det2(M)
    if np.any(np.abs(d) <= floor):
        raise SingularDeformationError("|det F| at or below floor")
    out = np.empty_like(M)
    out[..., 0, 0] = M[..., 1, 1]
    out[..., 0, 1] = -M[..., 0, 1]
    out[..., 1, 0] = -M[..., 1, 0]
    out[..., 1, 1] = M[..., 0, 0]
    return out / d[..., None, None]


def _spd_margin(A: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Quantities whose positivity certifies that A is SPD."""
    return A[..., 0, 0], A[..., 1, 1], det2(A)


def check_admissible(s: CellState, h_floor: float = H_FLOOR) -> AdmissibilityReport:
    """Report every violated invariant of a state.

    The involution H*|det F| = 1 is monitored (reported as a drift), not
    enforced; the hard invariants are H > 0, A SPD and A_cc > 0.
    """
    violations = []
    if np.any(s.H <= h_floor):
        violations.append("H")
    a11, a22, detA = _spd_margin(s.A)
    if np.any(a11 <= 0.0) or np.any(a22 <= 0.0) or np.any(detA <= 0.0):
        violations.append("A_spd")
    if np.any(np.abs(s.A[..., 0, 1] - s.A[..., 1, 0]) > 1e-12 * (1.0 + np.abs(s.A[..., 0, 1]))):
        violations.append("A_symmetric")
    if np.any(s.A_cc <= 0.0):
        violations.append("A_cc")
    drift = np.abs(s.H * np.abs(det2(s.F)) - 1.0)
    return AdmissibilityReport(ok=not violations, violations=violations,
                               involution_drift=drift if drift.ndim else float(drift))


def require_admissible(s: CellState, h_floor: float = H_FLOOR) -> None:
    """Raise :class:`AdmissibilityError` naming the first violated invariant."""
    report = check_admissible(s, h_floor)
    if not report.ok:
        raise AdmissibilityError(f"inadmissible state: {', '.join(report.violations)}")


def primitive_to_conserved(s: CellState) -> np.ndarray:
    """Pack a primitive state into the 11-component conservative vector."""
    require_admissible(s)
    q = np.empty(s.H.shape + (N_CONSERVED,))
    H = s.H
    q[..., 0] = H
    q[..., 1] = H * s.U[..., 0]
    q[..., 2] = H * s.U[..., 1]
    q[..., 3] = H * s.F[..., 0, 0]
    q[..., 4] = H * s.F[..., 1, 0]
    q[..., 5] = H * s.F[..., 0, 1]
    q[..., 6] = H * s.F[..., 1, 1]
    q[..., 7] = H * s.A[..., 0, 0]
    q[..., 8] = H * s.A[..., 0, 1]
    q[..., 9] = H * s.A[..., 1, 1]
    q[..., 10] = H * s.A_cc
    return q


def conserved_to_primitive(q: np.ndarray, h_floor: float = H_FLOOR,
                           check: bool = True) -> CellState:
    """Unpack a conservative vector; raises on vacuum or inadmissible states."""
    q = np.asarray(q, dtype=float)
    H = q[..., 0]
    if np.any(H <= h_floor):
        raise VacuumError(f"depth at or below vacuum floor {h_floor}")
    U = q[..., 1:3] / H[..., None]
    F = np.empty(H.shape + (2, 2))
    F[..., 0, 0] = q[..., 3] / H
    F[..., 1, 0] = q[..., 4] / H
    F[..., 0, 1] = q[..., 5] / H
    F[..., 1, 1] = q[..., 6] / H
    A = np.empty_like(F)
    A[..., 0, 0] = q[..., 7] / H
    A[..., 0, 1] = q[..., 8] / H
    A[..., 1, 0] = A[..., 0, 1]
    A[..., 1, 1] = q[..., 9] / H
    A_cc = q[..., 10] / H
    s = CellState(H, U, F, A, A_cc)
    if check:
        require_admissible(s, h_floor)
    return s


def strain_from_state(s: CellState) -> StrainState:
    """B = F A F^T (SPD by construction) and B_zz = H^2 A_cc."""
    # spelled out: batched 2x2 matmul is a hot spot on fine grids
    fa = s.F[..., 0, 0]
    fb = s.F[..., 0, 1]
    fc = s.F[..., 1, 0]
    fd = s.F[..., 1, 1]
    a11 = s.A[..., 0, 0]
    a12 = s.A[..., 0, 1]
    a22 = s.A[..., 1, 1]
    r1 = fa * a11 + fb * a12   # (F A) row x
    r2 = fa * a12 + fb * a22
    r3 = fc * a11 + fd * a12   # (F A) row y
    r4 = fc * a12 + fd * a22
    B = np.empty(s.F.shape)
    B[..., 0, 0] = r1 * fa + r2 * fb
    B[..., 0, 1] = r1 * fc + r2 * fd
    B[..., 1, 0] = B[..., 0, 1]
    B[..., 1, 1] = r3 * fc + r4 * fd
    return StrainState(B=B, B_zz=s.H ** 2 * s.A_cc)


def free_energy(s: CellState, p: PhysicalParams) -> np.ndarray:
    """Specific Helmholtz free energy of a state.

    E = |U|^2/2 + g H/2
        + (G/2) (tr B + B_zz - ln(det(F)^2 det(A) H^2 A_cc)).

    The logarithm argument equals det(B) * B_zz and is positive on every
    admissible state.
    """
    st = strain_from_state(s)
    trB = st.B[..., 0, 0] + st.B[..., 1, 1]
    log_arg = det2(s.F) ** 2 * det2(s.A) * s.H ** 2 * s.A_cc
    if np.any(log_arg <= 0.0):
        raise AdmissibilityError("nonpositive logarithm argument in free energy")
    kinetic = 0.5 * np.sum(s.U ** 2, axis=-1)
    return kinetic + 0.5 * p.g * s.H + 0.5 * p.G * (trB + st.B_zz - np.log(log_arg))


def entropy_tilde(s: CellState, p: PhysicalParams) -> np.ndarray:
    """Quadratic entropy (free energy without the logarithmic terms).

    This is the functional whose convexity makes the homogeneous system
    symmetric hyperbolic; it differs from :func:`free_energy` by
    -(G/2) ln(det(F)^2 det(A) H^2 A_cc).
    """
    st = strain_from_state(s)
    trB = st.B[..., 0, 0] + st.B[..., 1, 1]
    kinetic = 0.5 * np.sum(s.U ** 2, axis=-1)
    return kinetic + 0.5 * p.g * s.H + 0.5 * p.G * (trB + st.B_zz)


def dissipation_rate(s: CellState, p: PhysicalParams,
                     printed_constant: bool = False) -> np.ndarray:
    """Free-energy dissipation rate of the relaxation source.

    D = G (tr B + tr B^-1 - 4 + B_zz + 1/B_zz - 2) / (2 lam) >= 0,
    zero exactly at equilibrium (B = I, B_zz = 1).

    ``printed_constant=True`` replaces the vertical constant 2 by 1,
    reproducing a variant that does not vanish at equilibrium; it is kept
    for reporting only and never used by the solver.
    """
    st = strain_from_state(s)
    trB = st.B[..., 0, 0] + st.B[..., 1, 1]
    trBinv = trB / det2(st.B)
    vertical_const = 1.0 if printed_constant else 2.0
    return p.G * (trB + trBinv - 4.0 + st.B_zz + 1.0 / st.B_zz - vertical_const) \
        / (2.0 * p.lam)


def relaxation_targets(s: CellState, det_floor: float = DET_FLOOR
                       ) -> tuple[np.ndarray, np.ndarray]:
    """Equilibria of the relaxation source: A -> F^-1 F^-T, A_cc -> H^-2."""
    Finv = inv2(s.F, det_floor)
    A_inf = Finv @ np.swapaxes(Finv, -1, -2)
    return A_inf, 1.0 / s.H ** 2
