"""Numerical laboratory for PT-symmetric quantum and classical mechanics."""

__version__ = "0.1.0"
