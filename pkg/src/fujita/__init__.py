"""Numerical laboratory for the fractional Fujita equation u_t = Delta_alpha u + G(u)."""

__version__ = "0.1.0"
