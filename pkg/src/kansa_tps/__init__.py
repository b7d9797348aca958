"""Kansa unsymmetric collocation with thin-plate splines for the 2D Poisson
problem, with tools for checking unisolvence on random point sets."""

__version__ = "0.1.0"
