"""reviewguard: detection and analysis of deficient peer reviews."""

__version__ = "0.1.0"
