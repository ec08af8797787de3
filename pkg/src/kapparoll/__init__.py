"""Rolling-disk analysis of planar domains bounded by curvature-bounded loops."""

__version__ = "0.1.0"
