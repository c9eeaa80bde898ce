"""Arithmetic groups acting on the building and their finite truncated quotients."""
from .build import (Budget, OrbitData, QuotientComplex, Transporter, build_quotient,
                    residue_stabilizer, simplex_in_truncation, stab_solutions, stabilizer,
                    transporter, types_below)
from .levels import GroupSpec, LevelGroup, ResidueRing, SearchBudgetExceeded
from .orbits import Canonical, Standardized, canonicalize, stab_order, standardize
from .pair import (PairHomology, Transition, alpha_transition, chamber_projection,
                   orientation_character, orientation_character_of, pair_homology)

__all__ = [
    "Budget", "Canonical", "GroupSpec", "LevelGroup", "OrbitData", "PairHomology", "QuotientComplex",
    "ResidueRing", "SearchBudgetExceeded", "Standardized", "Transition", "Transporter",
    "alpha_transition", "build_quotient", "canonicalize", "chamber_projection",
    "orientation_character", "orientation_character_of", "pair_homology", "residue_stabilizer",
    "simplex_in_truncation", "stab_order", "stab_solutions", "stabilizer", "standardize",
    "transporter", "types_below",
]
