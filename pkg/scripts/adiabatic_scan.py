"""Parity sensitivity of an adiabatic CPHASE over coupler frequency and qubit detuning."""

import argparse

import numpy as np

from parityswitch.coupler import adiabatic_parity_sensitivity, table1_circuit_from_ratio
from parityswitch.errors import NumericalError
from parityswitch.spectral import TransmonParams
from parityswitch.units import GHZ, MHZ


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ratio", type=float, default=50.0, help="E_J/E_C of q2")
    args = ap.parse_args()
    c = table1_circuit_from_ratio(args.ratio)
    wcs = np.linspace(5.4, 7.4, 11) * GHZ
    dets = np.linspace(-600.0, 100.0, 15) * MHZ
    print("rows: w_q1 - w_q2 (MHz); columns: omega_c (GHz); entries: log10(1 - F)")
    print("        " + " ".join(f"{w / GHZ:6.2f}" for w in wcs))
    for d in dets:
        a2 = c.alphas[2]
        q1 = TransmonParams.from_frequency(c.omega_q2 + d, a2 + 10 * MHZ)
        cells = []
        for wc in wcs:
            try:
                inf = 1 - adiabatic_parity_sensitivity(c.replace(q1=q1), wc).fidelity
                cells.append(f"{np.log10(max(inf, 1e-300)):6.2f}")
            except NumericalError:
                cells.append("   n/a")
        print(f"{d / MHZ:7.1f} " + " ".join(cells))


if __name__ == "__main__":
    main()
