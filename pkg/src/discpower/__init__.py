"""Quantum discord and the discording power of two-qubit gates."""

__version__ = "0.1.0"
