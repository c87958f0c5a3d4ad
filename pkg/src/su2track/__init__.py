"""Geometric tracking control for quadrotors configured on SU(2) x R^3."""

__version__ = "0.1.0"
