"""Numerical toolkit for history-dependent Gronwall bounds and 2D inviscid
Boussinesq / density-dependent Euler simulations on the torus."""

__version__ = "0.1.0"
