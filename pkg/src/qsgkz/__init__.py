"""Quasi-symmetric GKZ systems: exact combinatorics, K-theory and analytic checks."""

__version__ = "0.1.0"
