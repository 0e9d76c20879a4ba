"""Exact exponential sums over finite fields, their L-functions, and the
spectral-sequence, Groebner and p-adic machinery used to study them."""

__version__ = "0.1.0"
