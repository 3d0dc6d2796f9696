"""Desk-scale laboratory for the cut-off soft-potential Boltzmann equation."""

__version__ = "0.1.0"
