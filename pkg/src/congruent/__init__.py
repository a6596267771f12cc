"""Constructive congruent-number certificates from Heegner points on
y^2 = x^3 - n^2 x."""

from .arith import DEFAULT_DIGITS
from .curve import CongruentCurve, Triangle, conductor, triangle_from_point
from .heegner import Certificate, Config, Verdict, verify
from .lattice import periods
from .lseries import coefficients

__all__ = [
    "DEFAULT_DIGITS",
    "Certificate",
    "CongruentCurve",
    "Config",
    "Triangle",
    "Verdict",
    "coefficients",
    "conductor",
    "periods",
    "triangle_from_point",
    "verify",
]

__version__ = "0.1.0"
