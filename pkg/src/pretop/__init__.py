"""Workbench for pretopological spaces, finite and symbolically definable."""

__version__ = "0.1.0"
