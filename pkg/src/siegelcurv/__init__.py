"""Curvature of the Siegel metric along Schiffer variations of explicit curves."""

__version__ = "0.1.0"
