"""Generators of magnetic translations and rotations, with classical and quantum checks."""

__version__ = "0.1.0"
