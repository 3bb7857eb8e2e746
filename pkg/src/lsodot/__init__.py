"""Executable linear proof-term calculus with scalars and superpositions."""

__version__ = "0.1.0"
