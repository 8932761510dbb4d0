"""Exact integrality-gap toolkit for bidirected Steiner tree relaxations."""

__version__ = "1.0.0"
