"""Exact computations on quotients of Bruhat-Tits buildings for GL_d over F_q[t]."""
from .quotient import GroupSpec, build_quotient, pair_homology
from .symbols import bound_constants, modular_symbol, ms_lattice

__version__ = "0.1.0"

__all__ = ["GroupSpec", "bound_constants", "build_quotient", "modular_symbol", "ms_lattice",
           "pair_homology", "__version__"]
