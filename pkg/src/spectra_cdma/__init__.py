"""Spectral statistics of random-spreading CDMA crosscorrelation matrices.

Closed-form asymptotic eigenvalue moments and free cumulants, a finite-size
Monte Carlo simulator for verification, and a moment-based Gauss quadrature
pipeline for spectral-efficiency and MMSE curves.
"""

__version__ = "0.1.0"
