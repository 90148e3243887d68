"""Structured-grid time stepper: transport-projection plus backward sources.

One full step advances the conservative field by

1. ghost-cell fill (copy / reflective / prescribed-state boundaries),
2. interface fans in both grid directions (one pass; the same fans give
   the time step, the conservative fluxes and the contact velocities),
3. conservative update of (H, HU, HF) and upwind transport of the
   distortion components with the interface mass fluxes,
4. singular-value cell projection restoring H |det F| = 1,
5. backward (implicit) relaxation and friction.

Every step appends an energy-budget entry: total free energy, boundary
free-energy flux, friction and relaxation sinks, and the residual of the
discrete dissipation inequality (nonpositive up to rounding when the
configuration is closed).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .la2 import right_singular_frame, rescale_singular_values
from .params import PhysicalParams
from .riemann_euler import InterfaceFlux, numerical_flux
from .state import (
    CellState, AdmissibilityError, H_FLOOR, conserved_to_primitive, det2,
    dissipation_rate, free_energy, inv2, primitive_to_conserved,
)

_EX = np.array([1.0, 0.0])
_EY = np.array([0.0, 1.0])

#: conserved components whose sign flips under a reflective ghost
_REFLECT_COMMON = (4, 5, 8)      # H Fya, H Fxb, H Aab


@dataclass
class BoundaryCondition:
    """One side of the domain: 'copy', 'reflect', or 'fixed'.

    Fixed sides hold a prescribed ghost state as a conserved 11-vector
    (build it with :func:`svmflow.state.primitive_to_conserved`, with the
    distortion at relaxation equilibrium so the ghost is source-free).
    With ``hold_cells`` the prescribed state is also re-imposed on the
    adjacent boundary cell row after every step (steady values at boundary
    cells), which anchors the corners where two prescriptions meet.
    """

    kind: str = "copy"
    ghost_q: np.ndarray | None = None
    hold_cells: bool = False

    def __post_init__(self) -> None:
        if self.kind not in ("copy", "reflect", "fixed"):
            raise ValueError(f"unknown boundary kind {self.kind!r}")
        if self.kind == "fixed" and self.ghost_q is None:
            raise ValueError("fixed boundary needs ghost_q")
        if self.hold_cells and self.kind != "fixed":
            raise ValueError("hold_cells requires a fixed boundary")


@dataclass
class Grid2D:
    nx: int
    ny: int
    dx: float
    dy: float
    x0: float = 0.0
    y0: float = 0.0
    bc: dict[str, BoundaryCondition] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.nx < 2 or self.ny < 2:
            raise ValueError("need at least 2x2 cells")
        if self.dx <= 0 or self.dy <= 0:
            raise ValueError("cell sizes must be positive")
        for side in ("left", "right", "bottom", "top"):
            self.bc.setdefault(side, BoundaryCondition("copy"))

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        x = self.x0 + (np.arange(self.nx) + 0.5) * self.dx
        y = self.y0 + (np.arange(self.ny) + 0.5) * self.dy
        return np.meshgrid(x, y, indexing="ij")


@dataclass
class FieldState:
    """Conserved field q[i, j, :], i along x, j along y."""

    q: np.ndarray
    t: float = 0.0
    step: int = 0

    def primitives(self, check: bool = False) -> CellState:
        return conserved_to_primitive(self.q, check=check)

    def copy(self) -> "FieldState":
        return FieldState(self.q.copy(), self.t, self.step)


@dataclass
class LedgerEntry:
    step: int
    t: float
    dt: float
    E_total: float
    boundary_flux: float
    dissipation: float
    friction: float
    residual: float


@dataclass
class EnergyLedger:
    entries: list[LedgerEntry] = field(default_factory=list)

    def append(self, entry: LedgerEntry) -> None:
        self.entries.append(entry)

    def totals(self) -> np.ndarray:
        return np.array([e.E_total for e in self.entries])

    def residuals(self) -> np.ndarray:
        return np.array([e.residual for e in self.entries])


class StepError(RuntimeError):
    """A sub-step failed; carries the step index and location if known."""


def _reflect_ghost(q_edge: np.ndarray, momentum_comp: int) -> np.ndarray:
    ghost = q_edge.copy()
    ghost[..., momentum_comp] *= -1.0
    for comp in _REFLECT_COMMON:
        ghost[..., comp] *= -1.0
    return ghost


def apply_boundaries(fs: FieldState, grid: Grid2D) -> np.ndarray:
    """Return the conserved field padded with one ghost layer per side."""
    nx, ny = grid.nx, grid.ny
    qp = np.empty((nx + 2, ny + 2, fs.q.shape[-1]))
    qp[1:-1, 1:-1] = fs.q

    def fill(side: str, target, interior, momentum_comp: int) -> None:
        bc = grid.bc[side]
        if bc.kind == "copy":
            qp[target] = qp[interior]
        elif bc.kind == "reflect":
            qp[target] = _reflect_ghost(qp[interior], momentum_comp)
        else:
            qp[target] = bc.ghost_q

    fill("left", (0, slice(1, -1)), (1, slice(1, -1)), 1)
    fill("right", (-1, slice(1, -1)), (-2, slice(1, -1)), 1)
    fill("bottom", (slice(1, -1), 0), (slice(1, -1), 1), 2)
    fill("top", (slice(1, -1), -1), (slice(1, -1), -2), 2)
    # corners never feed an interface; copy the diagonal neighbours so the
    # padded array stays admissible
    qp[0, 0], qp[0, -1] = qp[1, 1], qp[1, -2]
    qp[-1, 0], qp[-1, -1] = qp[-2, 1], qp[-2, -2]
    return qp


def _interface_fluxes(qp: np.ndarray, p: PhysicalParams
                      ) -> tuple[InterfaceFlux, InterfaceFlux]:
    """Fans on all x- and y-interfaces of the padded field."""
    left = conserved_to_primitive(qp[:-1, 1:-1], check=False)
    right = conserved_to_primitive(qp[1:, 1:-1], check=False)
    fx = numerical_flux(left, right, _EX, p)
    bottom = conserved_to_primitive(qp[1:-1, :-1], check=False)
    top = conserved_to_primitive(qp[1:-1, 1:], check=False)
    fy = numerical_flux(bottom, top, _EY, p)
    return fx, fy


def compute_timestep(fs: FieldState, grid: Grid2D, p: PhysicalParams,
                     cfl_factor: float = 0.5) -> float:
    """Time step from the actual fan speeds, per grid direction.

    tau = cfl * min(dx / max|s_x|, dy / max|s_y|), the half-CFL rule that
    keeps both one-dimensional sweeps individually stable.
    """
    qp = apply_boundaries(fs, grid)
    fx, fy = _interface_fluxes(qp, p)
    return _timestep_from_fluxes(fx, fy, grid, cfl_factor)


def _timestep_from_fluxes(fx: InterfaceFlux, fy: InterfaceFlux, grid: Grid2D,
                          cfl_factor: float) -> float:
    sx = float(np.max(fx.max_speed))
    sy = float(np.max(fy.max_speed))
    if not (np.isfinite(sx) and np.isfinite(sy)) or max(sx, sy) <= 0.0:
        raise StepError(f"non-finite or zero wave speeds (sx={sx}, sy={sy})")
    return cfl_factor * min(grid.dx / sx, grid.dy / sy)


def _upwind_distortion_flux(qp_lo: np.ndarray, qp_hi: np.ndarray,
                            mass_flux: np.ndarray) -> np.ndarray:
    """Distortion flux = mass flux times the upwind per-mass distortion."""
    a_lo = qp_lo[..., 7:11] / qp_lo[..., 0:1]
    a_hi = qp_hi[..., 7:11] / qp_hi[..., 0:1]
    a_up = np.where((mass_flux > 0.0)[..., None], a_lo, a_hi)
    return mass_flux[..., None] * a_up


def _check_field_admissible(q: np.ndarray, step: int,
                            h_floor: float = H_FLOOR) -> None:
    H = q[..., 0]
    detA = q[..., 7] * q[..., 9] - q[..., 8] ** 2   # (H Aaa)(H Abb) - (H Aab)^2
    bad = (H <= h_floor) | (q[..., 7] <= 0) | (q[..., 9] <= 0) \
        | (detA <= 0) | (q[..., 10] <= 0)
    if np.any(bad):
        i, j = np.argwhere(bad)[0]
        raise StepError(
            f"inadmissible cell ({i}, {j}) after hyperbolic update at "
            f"step {step}: H={H[i, j]:.3e}")


def hyperbolic_step(fs: FieldState, grid: Grid2D, p: PhysicalParams,
                    tau: float,
                    fluxes: tuple[InterfaceFlux, InterfaceFlux] | None = None
                    ) -> FieldState:
    """Conservative flux update plus upwind transport of the distortion."""
    qp = apply_boundaries(fs, grid)
    if fluxes is None:
        fluxes = _interface_fluxes(qp, p)
    fx, fy = fluxes

    flux_x = fx.flux.copy()
    flux_x[..., 7:11] = _upwind_distortion_flux(qp[:-1, 1:-1], qp[1:, 1:-1],
                                                fx.flux[..., 0])
    flux_y = fy.flux.copy()
    flux_y[..., 7:11] = _upwind_distortion_flux(qp[1:-1, :-1], qp[1:-1, 1:],
                                                fy.flux[..., 0])

    q_new = fs.q - tau / grid.dx * (flux_x[1:] - flux_x[:-1]) \
        - tau / grid.dy * (flux_y[:, 1:] - flux_y[:, :-1])
    _check_field_admissible(q_new, fs.step)
    return FieldState(q_new, fs.t + tau, fs.step + 1)


def upwind_transport_A(fs: FieldState, grid: Grid2D, p: PhysicalParams,
                       tau: float) -> FieldState:
    """Distortion transport alone (flux terms frozen); used by tests."""
    qp = apply_boundaries(fs, grid)
    fx, fy = _interface_fluxes(qp, p)
    flux_x = np.zeros_like(fx.flux)
    flux_x[..., 0] = fx.flux[..., 0]
    flux_x[..., 7:11] = _upwind_distortion_flux(qp[:-1, 1:-1], qp[1:, 1:-1],
                                                fx.flux[..., 0])
    flux_y = np.zeros_like(fy.flux)
    flux_y[..., 0] = fy.flux[..., 0]
    flux_y[..., 7:11] = _upwind_distortion_flux(qp[1:-1, :-1], qp[1:-1, 1:],
                                                fy.flux[..., 0])
    q_new = fs.q - tau / grid.dx * (flux_x[1:] - flux_x[:-1]) \
        - tau / grid.dy * (flux_y[:, 1:] - flux_y[:, :-1])
    return FieldState(q_new, fs.t + tau, fs.step + 1)


def project_cells(fs: FieldState, involution_tol: float = 1e-12) -> FieldState:
    """Rescale the singular values of F so that H |det F| = 1 in every cell.

    The depth is untouched; among the singular-value pairs compatible with
    the mass the one preserving the elastic energy tr(F A F^T) is taken
    (closest root to the pre-projection values), or the least-change pair
    when exact preservation is impossible.
    """
    s = fs.primitives()
    sig1, sig2, v1, v2 = right_singular_frame(s.F)
    if np.any(sig2 <= 1e-14):
        raise StepError("degenerate deformation gradient in projection")

    # cells already on the constraint (to rounding) must stay bitwise
    # untouched: near equal elastic weights the energy-preserving roots sit
    # O(sqrt(drift)) away, which would turn ulp-level drift into real noise
    delta = s.H * np.abs(det2(s.F)) - 1.0
    on_constraint = np.abs(delta) <= 1e-13

    w_a = np.einsum("...i,...ij,...j->...", v1, s.A, v1)
    w_b = np.einsum("...i,...ij,...j->...", v2, s.A, v2)
    a = sig1 ** 2 * w_a
    b = sig2 ** 2 * w_b
    energy = a + b

    # discriminant of w_a x^2 - energy x + w_b/H^2, written through the
    # involution drift (a naive difference of O(energy^2) terms loses the
    # small roots to cancellation)
    disc = (a - b) ** 2 + 4.0 * a * b * delta * (2.0 + delta) / (1.0 + delta) ** 2
    has_root = disc >= 0.0
    sq = np.sqrt(np.maximum(disc, 0.0))
    x_plus = (energy + sq) / (2.0 * w_a)
    x_minus = w_b / (w_a * s.H ** 2 * x_plus)      # Vieta: stable small root
    pick_plus = np.abs(x_plus - sig1 ** 2) <= np.abs(x_minus - sig1 ** 2)
    x_root = np.where(pick_plus, x_plus, x_minus)
    x_vertex = np.sqrt(w_b / (w_a * s.H ** 2))
    x = np.where(has_root, x_root, x_vertex)

    s1_new = np.sqrt(x)
    s2_new = 1.0 / (s.H * s1_new)
    F_new = rescale_singular_values(s.F, s1_new, s2_new, sig1, sig2, v1, v2)
    # factor-reconstruction roundoff grows with the anisotropy; one scalar
    # polish of the determinant brings the drift back to a few ulps
    F_new /= np.sqrt(s.H * np.abs(det2(F_new)))[..., None, None]
    F_new = np.where(on_constraint[..., None, None], s.F, F_new)

    drift = np.abs(s.H * np.abs(det2(F_new)) - 1.0)
    if np.any(drift > involution_tol):
        raise StepError(
            f"projection failed: residual involution drift "
            f"{float(np.max(drift)):.3e}")

    q_new = fs.q.copy()
    q_new[..., 3] = s.H * F_new[..., 0, 0]
    q_new[..., 4] = s.H * F_new[..., 1, 0]
    q_new[..., 5] = s.H * F_new[..., 0, 1]
    q_new[..., 6] = s.H * F_new[..., 1, 1]
    return FieldState(q_new, fs.t, fs.step)


def relax_sources(fs: FieldState, p: PhysicalParams, tau: float) -> FieldState:
    """Backward Euler for relaxation and friction (exact convex combination).

    A <- (A + (tau/lam) F^-1 F^-T) / (1 + tau/lam), likewise A_cc toward
    H^-2, and U <- U / (1 + tau K); targets use the post-transport F and H.
    """
    s = fs.primitives()
    theta = tau / p.lam
    Finv = inv2(s.F)
    A_inf = Finv @ np.swapaxes(Finv, -1, -2)
    A_new = (s.A + theta * A_inf) / (1.0 + theta)
    Acc_new = (s.A_cc + theta / s.H ** 2) / (1.0 + theta)

    q_new = fs.q.copy()
    q_new[..., 1:3] = fs.q[..., 1:3] / (1.0 + tau * p.K)
    q_new[..., 7] = s.H * A_new[..., 0, 0]
    q_new[..., 8] = s.H * A_new[..., 0, 1]
    q_new[..., 9] = s.H * A_new[..., 1, 1]
    q_new[..., 10] = s.H * Acc_new
    return FieldState(q_new, fs.t, fs.step)


def total_free_energy(fs: FieldState, grid: Grid2D, p: PhysicalParams) -> float:
    s = fs.primitives()
    return float(np.sum(free_energy(s, p) * s.H) * grid.dx * grid.dy)


def _boundary_entropy_outflow(qp: np.ndarray, grid: Grid2D,
                              p: PhysicalParams) -> float:
    """Net free-energy outflow rate through the domain boundary.

    Recomputes the interface fans only on the four boundary strips, which
    is cheap compared to the interior passes.
    """
    from .riemann_euler import interface_entropy_flux

    def strip(lo_sel, hi_sel, n):
        left = conserved_to_primitive(qp[lo_sel], check=False)
        right = conserved_to_primitive(qp[hi_sel], check=False)
        return interface_entropy_flux(left, right, n, p)

    out = np.sum(strip((-2, slice(1, -1)), (-1, slice(1, -1)), _EX))
    out -= np.sum(strip((0, slice(1, -1)), (1, slice(1, -1)), _EX))
    out_x = out * grid.dy
    out = np.sum(strip((slice(1, -1), -2), (slice(1, -1), -1), _EY))
    out -= np.sum(strip((slice(1, -1), 0), (slice(1, -1), 1), _EY))
    return float(out_x + out * grid.dx)


def hold_boundary_cells(fs: FieldState, grid: Grid2D) -> None:
    """Re-impose prescribed states on boundary cell rows (in place).

    Applied lid first, then the walls, so corner cells take wall values.
    """
    for side, sel in (("left", (0, slice(None))), ("right", (-1, slice(None))),
                      ("bottom", (slice(None), 0)), ("top", (slice(None), -1))):
        bc = grid.bc[side]
        if bc.kind == "fixed" and bc.hold_cells:
            fs.q[sel] = bc.ghost_q


def advance(fs: FieldState, grid: Grid2D, p: PhysicalParams,
            cfl_factor: float = 0.5, project_every: int = 1,
            ledger: EnergyLedger | None = None,
            dt_cap: float | None = None) -> FieldState:
    """One full step: fans -> time step -> transport -> projection -> sources."""
    qp = apply_boundaries(fs, grid)
    fx, fy = _interface_fluxes(qp, p)
    tau = _timestep_from_fluxes(fx, fy, grid, cfl_factor)
    if dt_cap is not None:
        tau = min(tau, dt_cap)

    E_before = total_free_energy(fs, grid, p)
    out = hyperbolic_step(fs, grid, p, tau, fluxes=(fx, fy))
    if project_every > 0 and out.step % project_every == 0:
        out = project_cells(out)
    out = relax_sources(out, p, tau)
    hold_boundary_cells(out, grid)

    if ledger is not None:
        E_after = total_free_energy(out, grid, p)
        s_new = out.primitives()
        cellv = grid.dx * grid.dy
        dissipation = float(np.sum(dissipation_rate(s_new, p) * s_new.H) * cellv)
        friction = float(np.sum(p.K * s_new.H * np.sum(s_new.U ** 2, -1)) * cellv)
        boundary = _boundary_entropy_outflow(qp, grid, p)
        residual = E_after - E_before + tau * (boundary + dissipation + friction)
        ledger.append(LedgerEntry(step=out.step, t=out.t, dt=tau,
                                  E_total=E_after, boundary_flux=boundary,
                                  dissipation=dissipation, friction=friction,
                                  residual=residual))
    return out


def energy_budget(ledger: EnergyLedger) -> np.ndarray:
    """Per-step residuals of the discrete dissipation inequality."""
    return ledger.residuals()


def make_uniform_field(grid: Grid2D, state: CellState) -> FieldState:
    """Constant field from one scalar state."""
    q0 = primitive_to_conserved(state)
    q = np.broadcast_to(q0, (grid.nx, grid.ny, q0.shape[-1])).copy()
    return FieldState(q)
