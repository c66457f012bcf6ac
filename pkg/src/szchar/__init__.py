"""Exact character-theoretic computations for Suzuki groups and their ambient symplectic groups."""

__version__ = "0.1.0"
