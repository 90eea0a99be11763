"""Holomorphic-metric differential geometry of complex curves and surfaces."""
__version__ = "0.1.0"
