"""Exact machinery for a spherical CR uniformization group and its limit set."""

__version__ = "0.1.0"
