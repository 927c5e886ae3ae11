"""Exact diagonalization and bound checks for lattice SU(2)/SU(3) NJL models."""

from .lattice import LatticeSpec

__version__ = "0.1.0"

__all__ = ["LatticeSpec", "__version__"]
