"""Spectral gaps of periodic weighted-graph Laplacians.

The package discretizes a fundamental domain of a periodic space as a
weighted graph with boundary ports, applies decoupling metric families,
and verifies Dirichlet-Neumann bracketing, equivariant and Floquet
spectral inclusion, finite-cover tower approximation, and band/gap
counting.
"""

__version__ = "0.1.0"
