"""Sensitivity time sets, set certificates and relation tests for concrete
compact dynamical systems."""

__version__ = "0.1.0"
