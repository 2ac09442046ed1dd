"""Workflow toolkit for rare-earth point defects in hexagonal SiC polytypes."""

__version__ = "0.1.0"
