"""Exact-arithmetic verification lab for p-adic measure and epsilon-factor
identities on finite quotients of Galois group towers."""

__version__ = "0.1.0"
