"""Numerical laboratory for the non-relativistic limit of the Klein-Gordon equation."""

__version__ = "0.1.0"
