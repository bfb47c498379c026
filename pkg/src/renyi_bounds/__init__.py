"""Numerical laboratory for bounds on Rényi entanglement growth in spin chains."""

__version__ = "0.1.0"
