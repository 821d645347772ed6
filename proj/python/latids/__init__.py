"""Finite-volume and pattern-based spectral distributions of finite-range
lattice operators: colourings, pattern frequencies, operator restrictions,
counting functions and the explicit convergence certificates."""

from latids._core import *  # noqa: F401,F403

__all__ = [name for name in dir() if not name.startswith("_")]
