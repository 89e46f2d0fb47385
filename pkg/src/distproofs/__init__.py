"""Simulation toolkit for distributed interactive proofs at desk scale."""

__version__ = "0.1.0"
