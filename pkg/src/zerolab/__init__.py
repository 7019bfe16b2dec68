"""zerolab: exact zero analysis, assignment and servo design for linear
multivariable systems."""

from .ratpoly import Poly, RatFn, RootSet, poly_gcd, roots, squarefree_decompose
from .statespace import StateSpace

__all__ = [
    "Poly",
    "RatFn",
    "RootSet",
    "StateSpace",
    "poly_gcd",
    "roots",
    "squarefree_decompose",
]

__version__ = "0.1.0"
