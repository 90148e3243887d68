"""Physical parameters of the viscoelastic shallow-water model."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalParams:
    """Bundle of the model constants.

    Attributes
    ----------
    g : float
        Gravity acceleration (length/time^2), > 0.
    G : float
        Specific elastic modulus (length^2/time^2), >= 0.  G = 0 recovers the
        plain shallow-water equations.
    lam : float
        Relaxation time (time), > 0.  The emergent viscosity is G*lam.
    K : float
        Linear friction coefficient (1/time), >= 0.
    zeta : float
        Slip parameter in [0, 2].  Only zeta = 0 is time-integrated; nonzero
        values are accepted for hyperbolicity analysis.
    """

    g: float = 10.0
    G: float = 1.0
    lam: float = 0.1
    K: float = 0.0
    zeta: float = 0.0

    def __post_init__(self) -> None:
        if not self.g > 0.0:
            raise ValueError(f"g must be > 0, got {self.g}")
        if self.G < 0.0:
            raise ValueError(f"G must be >= 0, got {self.G}")
        if not self.lam > 0.0:
            raise ValueError(f"lam must be > 0, got {self.lam}")
        if self.K < 0.0:
            raise ValueError(f"K must be >= 0, got {self.K}")
        if not 0.0 <= self.zeta <= 2.0:
            raise ValueError(f"zeta must lie in [0, 2], got {self.zeta}")
