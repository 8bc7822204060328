"""Exact invariants of hyperplane arrangements and their wonderful models.

Intersection lattices, building and nested sets, modular elements, local charts
of the wonderful compactification and their retractions, the reduced bar
construction dual to the holonomy algebra, and numerical associators on the
projective line.
"""

from .arrangement import Arrangement, builtin, parse_builtin_spec
from .errors import HyperArrError, InternalError, ValidationError
from .lattice import IntersectionLattice, build_lattice, full_building_set, irreducible_building_set

__version__ = "0.1.0"

__all__ = [
    "Arrangement",
    "HyperArrError",
    "InternalError",
    "IntersectionLattice",
    "ValidationError",
    "build_lattice",
    "builtin",
    "full_building_set",
    "irreducible_building_set",
    "parse_builtin_spec",
]
