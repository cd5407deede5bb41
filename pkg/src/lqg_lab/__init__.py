"""Simulation toolkit for Liouville quantum gravity at gamma^2 = 8/3."""

__version__ = "0.1.0"
