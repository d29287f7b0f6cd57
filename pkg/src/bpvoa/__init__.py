"""Exact computations for the Bershadsky-Polyakov vertex algebra W_3^(2)."""

__version__ = "0.1.0"
