"""Invariants of CICY threefolds in Hibi toric varieties."""

__version__ = "0.1.0"
