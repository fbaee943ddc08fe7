"""Bounded computation of stable exact structures on finite additive categories."""

__version__ = "0.1.0"
