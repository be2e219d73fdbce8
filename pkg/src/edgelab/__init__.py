"""Numerical laboratory for edge statistics of sample covariance matrices."""

__version__ = "0.1.0"
