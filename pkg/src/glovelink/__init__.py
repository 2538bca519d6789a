"""Glove-driven teleoperation of a simulated surgical arm."""

__version__ = "0.1.0"
