"""Shadowing, irregular points and entropy for topological dynamical systems."""

__version__ = "0.1.0"
