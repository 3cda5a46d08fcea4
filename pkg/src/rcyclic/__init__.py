"""Exact and Monte Carlo verification of freeness over the diagonal for R-cyclic matrices."""

__version__ = "0.1.0"

from .ncpart import Partition, enumerate_nc, is_noncrossing, join_nc, mobius_nc, interval_sigma
from .cumulant_core import cumulants_to_moments, moments_to_cumulants, grouped_cumulant
from .poly import Poly

__all__ = [
    "Partition",
    "Poly",
    "cumulants_to_moments",
    "enumerate_nc",
    "grouped_cumulant",
    "interval_sigma",
    "is_noncrossing",
    "join_nc",
    "mobius_nc",
    "moments_to_cumulants",
]
