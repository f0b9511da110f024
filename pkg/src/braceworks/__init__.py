"""Exact computations with brace operations, Hochschild and semi-co-Hochschild complexes."""

__version__ = "0.1.0"
