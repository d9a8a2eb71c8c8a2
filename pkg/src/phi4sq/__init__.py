"""Spectral simulator and verification suite for the double-cutoff
stochastic quantization of the quartic scalar field in three dimensions."""

__version__ = "0.1.0"
