"""Eisenstein series for principal congruence subgroups and their equivariant primitives."""

__version__ = "0.1.0"
