"""Numerical laboratory for r-variation of prime averages and prime Hilbert transforms."""

from pvlab.errors import (
    ConfigError,
    DomainError,
    PreconditionError,
    PvlabError,
    RangeError,
    ResolutionError,
    SizeError,
)
from pvlab.numtheory import ArithFn, FareyPoint, PrimeTable, sieve
from pvlab.variation import RealSequence, VariationResult, variation_exact, variation_norm

__version__ = "0.1.0"

__all__ = [
    "ArithFn",
    "ConfigError",
    "DomainError",
    "FareyPoint",
    "PreconditionError",
    "PrimeTable",
    "PvlabError",
    "RangeError",
    "RealSequence",
    "ResolutionError",
    "SizeError",
    "VariationResult",
    "sieve",
    "variation_exact",
    "variation_norm",
]
