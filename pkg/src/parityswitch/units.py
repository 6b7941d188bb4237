"""Unit conventions.

Energies are stored as h*GHz (plain floats in GHz). Angular frequencies in
the public API are rad/s, times in seconds. Heavy numerics use rad/ns and ns.
"""

import numpy as np

TWO_PI = 2.0 * np.pi
GHZ = TWO_PI * 1e9  # rad/s per GHz
MHZ = TWO_PI * 1e6
KHZ = TWO_PI * 1e3
NS = 1e-9

HBAR = 1.054571817e-34
H_PLANCK = 6.62607015e-34
K_B = 1.380649e-23


def ghz_to_rad_s(f_ghz):
    """Convert a frequency (or energy/h) in GHz to rad/s."""
    return np.asarray(f_ghz, dtype=float) * GHZ if np.ndim(f_ghz) else float(f_ghz) * GHZ


def rad_s_to_ghz(w):
    """Convert an angular frequency in rad/s to GHz."""
    return np.asarray(w, dtype=float) / GHZ if np.ndim(w) else float(w) / GHZ
