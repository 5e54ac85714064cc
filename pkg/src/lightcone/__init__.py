"""Zero mean curvature surfaces in the three-dimensional light cone."""

__version__ = "0.1.0"
