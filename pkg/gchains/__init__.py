"""Simulation and diagnostics for g-chains (chains with complete connections)."""

__version__ = '0.1.0'
