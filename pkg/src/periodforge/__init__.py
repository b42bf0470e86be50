"""Exact tools for translation-surface period characters."""
from .exactnum import QScalar, QVec2, format_scalar, parse_scalar
from .character import Character, Verdict, classify, omega, omega_blocks, analyze_image, degree_bound

__version__ = "0.1.0"

__all__ = [
    "QScalar",
    "QVec2",
    "format_scalar",
    "parse_scalar",
    "Character",
    "Verdict",
    "classify",
    "omega",
    "omega_blocks",
    "analyze_image",
    "degree_bound",
]
