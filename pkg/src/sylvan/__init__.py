"""Sylvester rank functions on amenable ring extensions."""
__version__ = "0.1.0"
