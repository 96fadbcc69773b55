"""Desk-scale laboratory for non-autonomous discrete dynamical systems."""

__version__ = "0.1.0"
