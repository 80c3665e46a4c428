"""Numerical cross-checks for alpha-independent sign moments of stable vectors."""

__version__ = "0.1.0"
