"""Calibrate a CZ at several E_J/E_C of q2 and report the parity-induced error.

Each ratio takes several minutes on one core. Usage:
    python scripts/parity_sweep.py 45 50 60 100
"""

import argparse
import json
import time
import warnings

from parityswitch.coupler import table1_circuit_from_ratio
from parityswitch.pulse import calibrate_pulse, parity_averaged_gate_analysis
from parityswitch.spectral import charge_dispersion_asymptotic
from parityswitch.units import GHZ, NS


def run(ratio: float, levels: int) -> dict:
    t0 = time.time()
    c = table1_circuit_from_ratio(ratio, levels=levels)
    cal = calibrate_pulse(c)
    an = parity_averaged_gate_analysis(c, cal.pulse, cal.omega_idle, with_outcome=True)
    eps2 = abs(charge_dispersion_asymptotic(c.q2.e_j, c.q2.e_c, 2)) * GHZ
    t_g = an.outcome.t_g
    return {
        "ratio": ratio,
        "amplitude_ghz": cal.pulse.amplitude_a / GHZ,
        "tau_c_ns": cal.pulse.tau_c / NS,
        "calibration_infidelity": cal.infidelity,
        "t_g_ns": t_g / NS,
        "delta_phi": an.phase_diff,
        "delta_phi_predicted": t_g / 2 * eps2,
        "averaged_infidelity": an.averaged_infidelity,
        "closed_form_infidelity": 3 / 320 * (eps2 * t_g) ** 2,
        "seconds": time.time() - t0,
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("ratios", nargs="+", type=float)
    ap.add_argument("--levels", type=int, default=4)
    ap.add_argument("--json", help="write all rows to this file")
    args = ap.parse_args()
    warnings.simplefilter("ignore")
    rows = []
    print("ratio  A(GHz)   tau_c(ns) t_g(ns)  dphi(rad)  pred(rad)  1-F_avg    closed form")
    for r in args.ratios:
        row = run(r, args.levels)
        rows.append(row)
        print(f"{r:5.1f}  {row['amplitude_ghz']:.5f}  {row['tau_c_ns']:8.3f}  {row['t_g_ns']:7.3f}"
              f"  {row['delta_phi']:+.5f}  {row['delta_phi_predicted']:.5f}"
              f"  {row['averaged_infidelity']:.3e}  {row['closed_form_infidelity']:.3e}", flush=True)
    if args.json:
        with open(args.json, "w") as f:
            json.dump(rows, f, indent=2)


if __name__ == "__main__":
    main()
