"""Layers, Jacobians and characteristic elements of branched ℤ_p^d-towers of graphs."""

__version__ = "0.1.0"
