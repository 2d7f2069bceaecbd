"""Finite quotients of binary-tree automorphism groups and arboreal Galois data."""

__version__ = "0.1.0"
