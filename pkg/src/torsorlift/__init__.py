"""Exact rational homotopy transfer and lifting of unipotent torsor cocycles."""

__version__ = "0.1.0"
