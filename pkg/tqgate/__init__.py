"""Fidelity, efficiency and gate-time models for two-qubit gates between
T centres in silicon."""

__version__ = "0.1.0"
