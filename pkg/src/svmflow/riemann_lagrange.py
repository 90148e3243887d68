"""Relaxation Riemann solver in material (Lagrangian) coordinates.

Along one material direction ("a"), with the transverse column of the
deformation gradient and the distortion tensor frozen as coefficients, the
homogeneous equations reduce to

    d/dt H^-1 - d/da V = 0,       V = Ux*Fyb - Uy*Fxb,
    d/dt F_a  - d/da U = 0,
    d/dt U    + d/da P_a = 0,     P_a the traction below,

with the scalar pressure  P = g H^2/2 + G H^3 A_cc  and traction

    P_a^i = P * (sigma F_b)^i - G (F_a^i A_aa + F_b^i A_ab),
    (sigma F_b) = (Fyb, -Fxb).

Linearizing the pressure/traction dynamics with one relaxation speed c per
side yields a 3-wave fan (speeds -c_l, 0, +c_r in the material coordinate)
whose intermediate states are closed-form.  Speeds are initialized so that
a sufficient subcharacteristic (Whitham) condition holds, which makes the
solver dissipate the free energy

    E = |U|^2/2 + g H/2 + (G/2)(F:A:F + H^2 A_cc - ln A_cc).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import PhysicalParams


class InadmissibleFanError(RuntimeError):
    """A starred depth came out nonpositive (relaxation speeds too small)."""


@dataclass
class LagrangianSide:
    """One side of a material-coordinate Riemann problem.

    ``F_a`` / ``F_b`` are the two columns of the deformation gradient in the
    solver's material basis, shape (..., 2); ``A`` is the distortion in the
    same basis.  ``V``, ``P_a``, ``Z`` are derived at equilibrium and ``c``
    is the relaxation speed (set by :func:`init_relaxation_speeds`).
    """

    H: np.ndarray
    U: np.ndarray
    F_a: np.ndarray
    F_b: np.ndarray
    A: np.ndarray
    A_cc: np.ndarray
    V: np.ndarray | None = None
    P_a: np.ndarray | None = None
    Z: np.ndarray | None = None
    c: np.ndarray | None = None

    def __post_init__(self) -> None:
        for name in ("H", "U", "F_a", "F_b", "A", "A_cc"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=float))


def make_side(H, U, F_a, F_b, A, A_cc, p: PhysicalParams) -> LagrangianSide:
    """Build a side with its relaxed variables initialized at equilibrium.

    The relaxed traction, transport velocity and their contraction start at
    the instantaneous-equilibrium values Pi = P_a, V = U.(sigma F_b),
    Z = P_a.(sigma F_b); the relaxation time of the linearized dynamics is
    never discretized.
    """
    side = LagrangianSide(H=H, U=U, F_a=F_a, F_b=F_b, A=A, A_cc=A_cc)
    side.P_a = traction(side.H, side.F_a, side.F_b, side.A, side.A_cc, p)
    side.V = cross_b(side.U, side.F_b)
    side.Z = cross_b(side.P_a, side.F_b)
    return side


def scalar_pressure(H: np.ndarray, A_cc: np.ndarray, p: PhysicalParams) -> np.ndarray:
    return 0.5 * p.g * H ** 2 + p.G * H ** 3 * A_cc


def cross_b(vec: np.ndarray, F_b: np.ndarray) -> np.ndarray:
    """Contraction vec^i sigma_ij F_b^j = vec_x Fyb - vec_y Fxb."""
    return vec[..., 0] * F_b[..., 1] - vec[..., 1] * F_b[..., 0]


def traction(H, F_a, F_b, A, A_cc, p: PhysicalParams) -> np.ndarray:
    """Traction P_a^i = P (sigma F_b)^i - G (F_a^i A_aa + F_b^i A_ab)."""
    P = scalar_pressure(H, A_cc, p)
    sigma_Fb = np.stack([F_b[..., 1], -F_b[..., 0]], axis=-1)
    elastic = A[..., 0, 0, None] * F_a + A[..., 0, 1, None] * F_b
    return P[..., None] * sigma_Fb - p.G * elastic


def lagrangian_energy(H, U, F_a, F_b, A, A_cc, p: PhysicalParams) -> np.ndarray:
    """Free energy with (A, A_cc, F_b) frozen as flux coefficients."""
    elastic = (A[..., 0, 0] * np.sum(F_a ** 2, axis=-1)
               + 2.0 * A[..., 0, 1] * np.sum(F_a * F_b, axis=-1)
               + A[..., 1, 1] * np.sum(F_b ** 2, axis=-1))
    return (0.5 * np.sum(U ** 2, axis=-1) + 0.5 * p.g * H
            + 0.5 * p.G * (elastic + H ** 2 * A_cc - np.log(A_cc)))


def whitham_lower_bound(side: LagrangianSide, p: PhysicalParams) -> np.ndarray:
    """Lower bound on c^2 sufficient for entropy consistency.

    c^2 >= max(G A_aa, (g H^3 + 3 G H^4 A_cc) |F_b|^2).
    """
    fb2 = np.sum(side.F_b ** 2, axis=-1)
    return np.maximum(p.G * side.A[..., 0, 0],
                      (p.g * side.H ** 3 + 3.0 * p.G * side.H ** 4 * side.A_cc) * fb2)


def init_relaxation_speeds(left: LagrangianSide, right: LagrangianSide,
                           p: PhysicalParams, ensure_consistency: bool = True,
                           max_iter: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Relaxation speeds satisfying the Whitham bound with a jump safeguard.

    Starting values

    c_o = c~_o + 2 H_o ( [V_l - V_r]_+ + [Z_o' - Z_o]_+ / (H_l c~_l + H_r c~_r) )

    where c~_o is the square root of the Whitham bound of side o; the
    positive-part terms enlarge the speeds on strong jumps.  Because the
    bound grows like H^3, a strongly compressed starred state can still
    outrun it, so (unless ``ensure_consistency`` is off) the speeds are then
    enlarged until the Whitham bound also holds at the starred depths and
    both starred depths are positive.  The loop leaves moderate data
    untouched and terminates because the starred depths approach the
    boundary depths as the speeds grow.
    """
    ct_l = np.sqrt(whitham_lower_bound(left, p))
    ct_r = np.sqrt(whitham_lower_bound(right, p))
    dv = np.maximum(left.V - right.V, 0.0)
    denom = left.H * ct_l + right.H * ct_r
    c_l = ct_l + 2.0 * left.H * (dv + np.maximum(right.Z - left.Z, 0.0) / denom)
    c_r = ct_r + 2.0 * right.H * (dv + np.maximum(left.Z - right.Z, 0.0) / denom)

    if ensure_consistency:
        # The dissipation Hessian couples the pressure and shear blocks, so
        # strongly compressed stars can need more than the printed values;
        # the pointwise requirement there is the sum G A_aa + beta(H) |F_b|^2
        # with beta(H) = g H^3 + 3 G H^4 A_cc at the starred depth.  Only
        # interfaces carrying an actual jump can fail certification (for
        # equal sides every residual term cancels exactly), so the check
        # runs on the jumpy subset and boosts only proven violators; clean
        # data keeps the printed speeds.
        jump = (np.abs(left.V - right.V) + np.abs(left.Z - right.Z)
                + np.abs(1.0 / left.H - 1.0 / right.H)
                + np.abs(left.P_a - right.P_a).sum(axis=-1)
                + np.abs(left.U - right.U).sum(axis=-1))
        scale = 1.0 + np.abs(left.Z) + np.abs(right.Z)
        jumpy = jump > 1e-13 * scale
        if jumpy.ndim == 0:
            if jumpy:
                left.c, right.c = c_l, c_r
                _certify_speeds(left, right, p, max_iter)
                c_l, c_r = left.c, right.c
        else:
            active = np.nonzero(jumpy)
            if active[0].size:
                sub_l = _subset_side(left, active)
                sub_r = _subset_side(right, active)
                sub_l.c, sub_r.c = c_l[active], c_r[active]
                _certify_speeds(sub_l, sub_r, p, max_iter)
                c_l, c_r = c_l.copy(), c_r.copy()
                c_l[active] = sub_l.c
                c_r[active] = sub_r.c

    left.c = c_l
    right.c = c_r
    return c_l, c_r


def _subset_side(side: LagrangianSide, idx) -> LagrangianSide:
    sub = LagrangianSide(H=side.H[idx], U=side.U[idx], F_a=side.F_a[idx],
                         F_b=side.F_b[idx], A=side.A[idx], A_cc=side.A_cc[idx])
    sub.V, sub.P_a, sub.Z = side.V[idx], side.P_a[idx], side.Z[idx]
    return sub


def _certify_speeds(left: LagrangianSide, right: LagrangianSide,
                    p: PhysicalParams, max_iter: int) -> None:
    """Enlarge per-side speeds in place until the fan certifies."""
    fb2_l = left.F_b[..., 0] ** 2 + left.F_b[..., 1] ** 2
    fb2_r = right.F_b[..., 0] ** 2 + right.F_b[..., 1] ** 2
    tol_l = 1e-14 * (1.0 + np.abs(lagrangian_energy(
        left.H, left.U, left.F_a, left.F_b, left.A, left.A_cc, p)))
    tol_r = 1e-14 * (1.0 + np.abs(lagrangian_energy(
        right.H, right.U, right.F_a, right.F_b, right.A, right.A_cc, p)))
    c_l, c_r = left.c, right.c
    for _ in range(max_iter):
        fan = solve_lagrangian_fan(left, right, check_positive=False)
        res_l, res_r = check_entropy_consistency(fan, left, right, p)
        bad_pos = (fan.H_star_l <= 0.0) | (fan.H_star_r <= 0.0)
        bad_l = bad_pos | (res_l > tol_l)
        bad_r = bad_pos | (res_r > tol_r)
        if not (np.any(bad_l) or np.any(bad_r)):
            return
        H_l = np.maximum(left.H, np.where(fan.H_star_l > 0, fan.H_star_l, np.inf))
        H_r = np.maximum(right.H, np.where(fan.H_star_r > 0, fan.H_star_r, np.inf))
        H_l = np.minimum(H_l, 1e6 * left.H)
        H_r = np.minimum(H_r, 1e6 * right.H)
        req_l = (p.G * left.A[..., 0, 0]
                 + (p.g * H_l ** 3 + 3.0 * p.G * H_l ** 4 * left.A_cc) * fb2_l)
        req_r = (p.G * right.A[..., 0, 0]
                 + (p.g * H_r ** 3 + 3.0 * p.G * H_r ** 4 * right.A_cc) * fb2_r)
        c_l = np.where(bad_l, np.maximum(1.5 * c_l, np.sqrt(req_l)), c_l)
        c_r = np.where(bad_r, np.maximum(1.5 * c_r, np.sqrt(req_r)), c_r)
        left.c, right.c = c_l, c_r
    raise InadmissibleFanError("speed enlargement did not converge")


@dataclass
class LagrangianFan:
    """3-wave fan: speeds (-c_l, 0, +c_r) and closed-form starred states."""

    c_l: np.ndarray
    c_r: np.ndarray
    H_star_l: np.ndarray
    H_star_r: np.ndarray
    U_star: np.ndarray
    Pi_star: np.ndarray
    V_star: np.ndarray
    Z_star: np.ndarray
    F_a_star_l: np.ndarray
    F_a_star_r: np.ndarray
    flux: np.ndarray          # (..., 5) flux of (H^-1, Fxa, Fya, Ux, Uy)

    @property
    def speeds(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (-self.c_l, np.zeros_like(self.c_l), self.c_r)


def solve_lagrangian_fan(left: LagrangianSide, right: LagrangianSide,
                         check_positive: bool = True) -> LagrangianFan:
    """Closed-form 3-wave solution of the relaxed material-frame problem.

    With a single speed (c_l = c_r) the starred formulas reduce to the
    one-parameter solution of the relaxation system; distinct per-side
    speeds enter the left/right-going characteristic combinations.
    """
    if left.c is None or right.c is None:
        raise ValueError("relaxation speeds not set; call init_relaxation_speeds")
    c_l, c_r = left.c, right.c
    den = c_l + c_r

    U_star = (c_l[..., None] * left.U + c_r[..., None] * right.U
              + left.P_a - right.P_a) / den[..., None]
    Pi_star = (c_r[..., None] * left.P_a + c_l[..., None] * right.P_a
               + (c_l * c_r)[..., None] * (left.U - right.U)) / den[..., None]
    V_star = (c_l * left.V + c_r * right.V + left.Z - right.Z) / den
    Z_star = (c_r * left.Z + c_l * right.Z + c_l * c_r * (left.V - right.V)) / den

    inv_H_star_l = 1.0 / left.H + (V_star - left.V) / c_l
    inv_H_star_r = 1.0 / right.H + (right.V - V_star) / c_r
    if check_positive and (np.any(inv_H_star_l <= 0.0) or np.any(inv_H_star_r <= 0.0)):
        raise InadmissibleFanError("nonpositive starred depth; increase speeds")

    F_a_star_l = left.F_a + (U_star - left.U) / c_l[..., None]
    F_a_star_r = right.F_a + (right.U - U_star) / c_r[..., None]

    flux = np.concatenate([
        -V_star[..., None], -U_star, Pi_star,
    ], axis=-1)

    return LagrangianFan(
        c_l=c_l, c_r=c_r,
        H_star_l=1.0 / inv_H_star_l, H_star_r=1.0 / inv_H_star_r,
        U_star=U_star, Pi_star=Pi_star, V_star=V_star, Z_star=Z_star,
        F_a_star_l=F_a_star_l, F_a_star_r=F_a_star_r, flux=flux)


def _half_flux_combo(H, U, F_a, side: LagrangianSide, c, p: PhysicalParams
                     ) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Equilibrium quantities entering the dissipation functional.

    Returns (E, gplus_minus, T_H, T_F) at the state (H, U, F_a) with side
    coefficients, where gplus_minus = (G+ - G-)/c = |U|^2/2 + |P_a|^2/(2 c^2)
    and T is the vector of outer-wave strong invariants
    (H^-1 + Z/c^2, F_a + P_a/c^2).
    """
    P_a = traction(H, F_a, side.F_b, side.A, side.A_cc, p)
    Z = cross_b(P_a, side.F_b)
    E = lagrangian_energy(H, U, F_a, side.F_b, side.A, side.A_cc, p)
    gpm = 0.5 * np.sum(U ** 2, axis=-1) + 0.5 * np.sum(P_a ** 2, axis=-1) / c ** 2
    T_H = 1.0 / H + Z / c ** 2
    T_F = F_a + P_a / c[..., None] ** 2
    return E, gpm, T_H, T_F


def _side_residual(H1, U1, F1, side: LagrangianSide, c, p: PhysicalParams) -> np.ndarray:
    """Signed dissipation residual of one intermediate state vs its boundary."""
    E1, g1, TH1, TF1 = _half_flux_combo(H1, U1, F1, side, c, p)
    E2, g2, TH2, TF2 = _half_flux_combo(side.H, side.U, side.F_a, side, c, p)
    P1 = scalar_pressure(H1, side.A_cc, p)
    # dE/dF_a at the intermediate state (coefficients of the side)
    dE_dF = p.G * (side.A[..., 0, 0, None] * F1 + side.A[..., 0, 1, None] * side.F_b)
    grad_term = -P1 * (TH1 - TH2) + np.sum(dE_dF * (TF1 - TF2), axis=-1)
    return (E1 - g1) - (E2 - g2) - grad_term


def check_entropy_consistency(fan: LagrangianFan, left: LagrangianSide,
                              right: LagrangianSide, p: PhysicalParams
                              ) -> tuple[np.ndarray, np.ndarray]:
    """Signed entropy residuals of both intermediate states (<= 0 certifies).

    Each residual compares an intermediate state with its outward boundary
    state through the dissipation functional of the flux splitting; with
    speeds from :func:`init_relaxation_speeds` both residuals are
    nonpositive up to rounding.
    """
    res_l = _side_residual(fan.H_star_l, fan.U_star, fan.F_a_star_l, left, fan.c_l, p)
    res_r = _side_residual(fan.H_star_r, fan.U_star, fan.F_a_star_r, right, fan.c_r, p)
    return res_l, res_r
