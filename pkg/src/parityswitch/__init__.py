"""Charge-parity switching in transmon tunable-coupler gates."""

__version__ = "0.1.0"
