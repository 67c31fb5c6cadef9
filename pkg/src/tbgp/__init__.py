"""Template-style generic programming toolkit: one residual, many scalar types."""

__version__ = "0.1.0"
