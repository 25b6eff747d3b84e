"""
Mesh construction and checking.

`Mesh` is immutable; the builder attaches TRiSK perp weights, `validate_mesh`
reports every invariant without raising.
"""

from .hex_builder import build_periodic_hex_mesh, with_fields
from .mesh import Mesh
from .perp_weights import compute_perp_weights
from .validation import CheckResult, MeshValidationReport, validate_mesh

__all__ = [
    "CheckResult",
    "Mesh",
    "MeshValidationReport",
    "build_periodic_hex_mesh",
    "compute_perp_weights",
    "validate_mesh",
    "with_fields",
]
