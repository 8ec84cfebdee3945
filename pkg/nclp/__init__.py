"""Finite-dimensional noncommutative L_p toolkit."""

__version__ = "0.1.0"
