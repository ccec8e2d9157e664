"""Verification toolkit for piecewise-linear area-minimizing cones in R^4.

The package reconstructs the candidate singular cones over partitions of
the 3-sphere into admissible cells, checks every combinatorial and
metric claim behind the classification, and runs the mass-comparison
experiments that eliminate the non-minimizing candidates.
"""

from .geometry import ALPHA, DIHEDRAL

__all__ = ["ALPHA", "DIHEDRAL"]

__version__ = "0.1.0"
