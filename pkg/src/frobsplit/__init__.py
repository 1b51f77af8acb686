"""Exact computations around Frobenius splittings in characteristic p."""

from .fpoly import FpPoly, HypersurfaceRing, PolyRing, poly
from .witt import WittVector, WnModPModuleBasis

__version__ = "0.1.0"

__all__ = ["FpPoly", "HypersurfaceRing", "PolyRing", "WittVector", "WnModPModuleBasis", "poly"]
