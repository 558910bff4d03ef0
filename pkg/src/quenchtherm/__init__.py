"""Finite-time thermalization of a quantum oscillator by quenching a coupled twin."""

__version__ = "0.1.0"
