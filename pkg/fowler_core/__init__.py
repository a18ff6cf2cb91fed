"""Numerical core for the conformally invariant fourth-order Gross-Pitaevskii system."""

__version__ = "0.1.0"
