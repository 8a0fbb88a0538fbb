"""Simulator for an antiferromagnetic spin-chain NMR quantum computer."""

__version__ = "0.1.0"
