"""Exact computation of graded pieces, socles and annihilators of top local cohomology of hypersurfaces."""

__version__ = "1.0.0"
