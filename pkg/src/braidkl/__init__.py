"""Exact Kazhdan-Lusztig and Z-polynomials of matroids, with the braid matroids
checked against series-parallel enumeration and generating functions."""
from .exactmath import IntPolynomial
from .klcalc import KLResult, braid_kl, kl_generic, kl_generic_braid
from .matroid import Matroid, braid

__all__ = ["IntPolynomial", "KLResult", "Matroid", "braid", "braid_kl", "kl_generic", "kl_generic_braid"]
__version__ = "0.1.0"
