"""Conditional GAN trainer for the phase-contour to temperature mapping."""

__version__ = "0.1.0"
