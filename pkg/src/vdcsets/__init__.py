"""Experimental verification and refutation of van der Corput set properties."""

__version__ = "0.1.0"
