"""Exact and numerical checks of a transference proof of the ternary Goldbach theorem."""

__version__ = "0.1.0"
