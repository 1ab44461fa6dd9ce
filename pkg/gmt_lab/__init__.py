"""Finite fragments of generalized measurement theories: states, certificates and structure checks."""

__version__ = "0.1.0"
