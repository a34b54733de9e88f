"""Rotated topological codes on integral lattices: construction, search and verification."""

__version__ = "0.1.0"
