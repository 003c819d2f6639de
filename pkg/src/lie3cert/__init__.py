"""Exact-arithmetic certificates for the real subalgebra classifications of
sl3(R), su(2,1) and su(3)."""

__version__ = "0.1.0"
