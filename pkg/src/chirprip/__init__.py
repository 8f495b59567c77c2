"""Explicit chirp RIP matrices: construction, measurement and the exponent LP."""

__version__ = "0.1.0"
