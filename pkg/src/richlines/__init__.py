"""Exact incidence geometry for lines in 3-space.

Rational points and lines, sparse trivariate polynomials, the rich-point
engine, polynomial partitioning, surfaces rich in lines and the recursive
cluster decomposition built on top of them.
"""

from .exact import Line3, PairKind, Point2, Point3, Q, canonicalize, classify_pair, dist_sq, line_through, q_str
from .poly import TriPoly, UniPoly, X1, X2, X3

__all__ = [
    "Line3",
    "PairKind",
    "Point2",
    "Point3",
    "Q",
    "canonicalize",
    "classify_pair",
    "dist_sq",
    "line_through",
    "q_str",
    "TriPoly",
    "UniPoly",
    "X1",
    "X2",
    "X3",
]

__version__ = "0.1.0"
