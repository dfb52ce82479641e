"""Computational tools around transitivity degrees of groups."""

__version__ = "0.1.0"
