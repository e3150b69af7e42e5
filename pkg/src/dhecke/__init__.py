"""Derivatives of Hecke-type series at weight two, computed exactly modulo p^t."""

__version__ = "0.1.0"
