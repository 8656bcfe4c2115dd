"""Reflection groups over F_p, their cohomology, and the fusion rings they produce."""

__version__ = "0.1.0"
