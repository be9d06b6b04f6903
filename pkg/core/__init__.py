"""Core protocols, models, and infrastructure."""

__version__ = "0.1.0"
