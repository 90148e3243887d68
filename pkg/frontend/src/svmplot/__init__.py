"""Post-processing figures for the viscoelastic shallow-water solver."""

from .figures import (
    energy_violations,
    plot_energy,
    plot_slices,
    plot_surface,
    plot_vector_field,
)
from .readers import SchemaError, read_energy, read_slice, read_snapshot

__version__ = "0.1.0"

__all__ = [
    "SchemaError",
    "energy_violations",
    "plot_energy",
    "plot_slices",
    "plot_surface",
    "plot_vector_field",
    "read_energy",
    "read_slice",
    "read_snapshot",
    "__version__",
]
