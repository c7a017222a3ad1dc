"""Computation with germs of holomorphic diffeomorphisms of (C, 0)."""

from .errors import GermError
from .gaussian import GaussianRational
from .jets import JetSeries, classify, compose, invert, iterate

__all__ = ["GermError", "GaussianRational", "JetSeries", "classify", "compose", "invert", "iterate"]
__version__ = "0.1.0"
