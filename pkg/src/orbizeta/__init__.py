"""Fuchsian group spectra, Selberg zeta products, automorphic kernels and index arithmetic."""

__version__ = "0.1.0"
