"""Exact computation of genus-one correlation functions for vertex operator algebras."""
from .coeff import LAM, Scalar
from .voa import build, build_heisenberg, build_lattice, build_virasoro

__version__ = "0.1.0"
__all__ = ["LAM", "Scalar", "build", "build_heisenberg", "build_lattice", "build_virasoro"]
