"""Weyl sums along filiform nilflows."""

__version__ = "0.1.0"
