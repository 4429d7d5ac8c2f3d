"""Stable forms, Hitchin-type flows on Lie algebras, curvature certificates and special Kaehler signatures."""

__version__ = "0.1.0"
