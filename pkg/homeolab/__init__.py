"""Exact piecewise-linear dynamics on the interval and the circle."""

__version__ = "0.1.0"
