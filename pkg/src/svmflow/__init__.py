"""Finite-volume solver for viscoelastic (Maxwell-type) shallow-water flow."""

from .params import PhysicalParams
from .state import (
    CellState,
    StrainState,
    AdmissibilityError,
    VacuumError,
    SingularDeformationError,
    check_admissible,
    conserved_to_primitive,
    dissipation_rate,
    entropy_tilde,
    free_energy,
    primitive_to_conserved,
    relaxation_targets,
    strain_from_state,
)

__version__ = "0.1.0"

__all__ = [
    "PhysicalParams",
    "CellState",
    "StrainState",
    "AdmissibilityError",
    "VacuumError",
    "SingularDeformationError",
    "check_admissible",
    "conserved_to_primitive",
    "dissipation_rate",
    "entropy_tilde",
    "free_energy",
    "primitive_to_conserved",
    "relaxation_targets",
    "strain_from_state",
    "__version__",
]
