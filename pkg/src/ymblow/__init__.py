"""Numerical toolkit for the stability of self-similar Yang-Mills blowup in
odd dimensions, in the equivariant reduction."""

__version__ = "0.1.0"
