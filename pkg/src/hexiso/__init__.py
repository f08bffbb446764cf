"""Percolation geometry on the triangular lattice: right-most paths, passage times, boundary norms and Wulff shapes."""

__version__ = "0.1.0"
