"""Simulation and verification tools for the Skyrme hedgehog field equation."""

__version__ = "0.1.0"
