"""Computational laboratory for selective divergence, densities of subsequence maps and selection games."""

__version__ = "0.1.0"
