"""Fock-space simulation and analysis of post-selected linear-optical gates."""

__version__ = "0.1.0"
