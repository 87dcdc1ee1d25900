"""Spectral toolkit for the clamped plate under compression."""

__version__ = "0.1.0"
