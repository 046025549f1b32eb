"""Piston problem for the compressible Euler equations: exact solutions,
measure solutions and their high-Mach-number limits."""

__version__ = "0.1.0"
