"""Exact certificates of positivity for matrix polynomials."""

from .polycore import Polynomial, parse_polynomial
from .matpoly import MatrixPolynomial, determinant, smith_normal_form
from .certkit import PiecewiseCertificate, verify_certificate

__all__ = [
    "MatrixPolynomial",
    "PiecewiseCertificate",
    "Polynomial",
    "determinant",
    "parse_polynomial",
    "smith_normal_form",
    "verify_certificate",
]

__version__ = "0.1.0"
