"""Derived endomorphisms and deformations of sheaves on monomial covers."""

__version__ = "0.1.0"
