"""Finite-difference laboratory for entire graphical self-shrinkers."""

from ._kernels import backend

__version__ = "0.1.0"

__all__ = ["__version__", "backend"]
