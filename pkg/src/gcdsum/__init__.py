"""Arithmetic of GCD quadratic forms, their norm bounds, and zeta Omega-bound reports."""

__version__ = "0.1.0"

from gcdsum.errors import (  # noqa: E402
    DomainError,
    GcdSumError,
    HypothesisError,
    PoleError,
    RangeError,
    SizeError,
)

__all__ = [
    "__version__",
    "DomainError",
    "GcdSumError",
    "HypothesisError",
    "PoleError",
    "RangeError",
    "SizeError",
]
