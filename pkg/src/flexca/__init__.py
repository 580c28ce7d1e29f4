"""Flexible carrier-aggregation system simulator."""

__version__ = "0.1.0"
