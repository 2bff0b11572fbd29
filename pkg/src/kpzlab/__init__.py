"""Numerical routes to the one-point laws of the KPZ class.

Fredholm determinants of the Airy kernel, the Brownian scattering operator for
general barriers, the Hastings-McLeod solution of Painleve II, and a Monte
Carlo last-passage percolation simulator.
"""

__version__ = "0.1.0"
