"""Exact-arithmetic verification toolkit for Nipp's quaternary form tables."""

__version__ = "0.1.0"
