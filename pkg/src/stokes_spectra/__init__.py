"""Stokes complexes, ray admissibility and spectral loci of complex
polynomial Schrodinger operators -y'' + P(z) y = lambda y with boundary
conditions on rays."""

from ._kernels import backend_name
from .polycore import PolynomialC, RectContour, count_zeros_in_rect, roots

__version__ = "0.1.0"

__all__ = [
    "PolynomialC",
    "RectContour",
    "roots",
    "count_zeros_in_rect",
    "backend_name",
    "__version__",
]
