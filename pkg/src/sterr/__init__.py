"""Certified bounds for the Stieltjes approximation error of li(x)."""

__version__ = "0.1.0"
