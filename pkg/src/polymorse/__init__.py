"""Weighted Morse homotopy on moment polytopes of toric Fano surfaces.

The package builds the category Mo(P) of a monotone moment polytope:
morphism spaces from projected Lagrangian-section intersections, exact
structure constants e^{-kappa} for the product, traced gradient trees,
and a verifier matching the whole structure against the holomorphic
side of the mirror (section counting and normalization constants).
"""

from .composition_engine import (compose_table, structure_constant,
                                 table_json, trace_tree,
                                 verify_associativity)
from .geometry import (inverse_moment_map, moment_map, potential,
                       vector_field)
from .mirror_verifier import (h0_basis, verify_dim_match,
                              verify_exceptionality, verify_functoriality)
from .morse_category import hom_space, hom_space_json
from .surface_model import (PolySurface, load_collection, load_surface,
                            preset_exceptional_collection, preset_surface,
                            section_polytope)
from .symbolic_kernel import LogValue, Poly2, RatFunc2

__version__ = "0.1.0"

__all__ = [
    "PolySurface",
    "LogValue",
    "Poly2",
    "RatFunc2",
    "compose_table",
    "h0_basis",
    "hom_space",
    "hom_space_json",
    "inverse_moment_map",
    "load_collection",
    "load_surface",
    "moment_map",
    "potential",
    "preset_exceptional_collection",
    "preset_surface",
    "section_polytope",
    "structure_constant",
    "table_json",
    "trace_tree",
    "vector_field",
    "verify_associativity",
    "verify_dim_match",
    "verify_exceptionality",
    "verify_functoriality",
]
