"""Static ZZ versus coupler frequency, idling points and their parity spread."""

import argparse

import numpy as np

from parityswitch.coupler import (
    find_idling_frequency,
    parity_zz_spread,
    table1_circuit_from_ratio,
    zz_perturbative,
    zz_rate,
)
from parityswitch.units import GHZ, TWO_PI


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ratio", type=float, default=50.0, help="E_J/E_C of q2")
    ap.add_argument("--n", type=int, default=27, help="sweep points")
    args = ap.parse_args()
    c = table1_circuit_from_ratio(args.ratio)
    print("omega_c(GHz)  zeta_exact(kHz)  zeta_pert(kHz)")
    for wc in np.linspace(5.4, 8.0, args.n) * GHZ:
        print(f"{wc / GHZ:11.3f}  {zz_rate(c, wc) / TWO_PI / 1e3:15.3f}"
              f"  {zz_perturbative(c, wc) / TWO_PI / 1e3:14.3f}")
    for wc in find_idling_frequency(c):
        rep = parity_zz_spread(c, wc)
        print(f"idling at {wc / GHZ:.6f} GHz: parity RMS {rep.rms / TWO_PI:.2f} Hz"
              f" (exact {rep.rms_exact / TWO_PI:.2f} Hz)")


if __name__ == "__main__":
    main()
