"""Sketch-based structural stress analysis toolkit.

Data synthesis by linear-elastic FEM on watertight shapes, a two-branch
image-to-image generator predicting normal and stress maps from a sketch and
a force location, region-wise multi-force aggregation, evaluation metrics,
and an HTTP service for interactive use.
"""

__version__ = "0.1.0"
