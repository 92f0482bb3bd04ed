"""Exact Hall algebra computations for the Kronecker quiver and P^1."""

__version__ = "0.1.0"
