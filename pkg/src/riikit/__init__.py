"""Numerical checks around reverse isoperimetric inequalities for holomorphic curves."""

__version__ = "0.1.0"
