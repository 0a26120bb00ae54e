"""Flat-pack furniture design-to-fabrication compiler."""

__version__ = "0.1.0"
