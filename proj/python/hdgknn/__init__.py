"""Approximate k-nearest-neighbour search over a hierarchical Delaunay graph."""

from ._core import ConfigError, FormatError, Index, exact_knn, gen_poisson

__all__ = ["ConfigError", "FormatError", "Index", "exact_knn", "gen_poisson"]
