"""Metric landscapes at several coherence levels: optimal region and dominant errors.

Set PARITYSWITCH_WORKERS to parallelize over E_C rows.
"""

import argparse
from collections import Counter

import numpy as np

from parityswitch.design.metric import default_grid, landscape_scan
from parityswitch.design.noise import NoiseModel


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--t1-ms", type=float, nargs="+", default=[0.125, 0.25, 0.5])
    ap.add_argument("--n", type=int, default=60)
    ap.add_argument("--model", choices=["basic", "advanced"], default="basic")
    args = ap.parse_args()
    ej, ec = default_grid(args.n)
    for t in args.t1_ms:
        land = landscape_scan(ej, ec, NoiseModel(t * 1e-3, t * 1e-3, model_kind=args.model))
        cej, cec = land.masked_centroid()
        i = np.unravel_index(np.nanargmin(land.one_minus_p), land.one_minus_p.shape)
        print(f"T1 = T_phi = {t:g} ms")
        print(f"  centroid of optimal region: E_J = {cej:.2f} GHz, E_C = {cec:.3f} GHz,"
              f" E_J/E_C = {cej / cec:.1f}")
        print(f"  best cell: E_J = {ej[i[1]]:.2f}, E_C = {ec[i[0]]:.3f},"
              f" 1 - P = {land.one_minus_p[i]:.3e}")
        counts = Counter(land.dominant.ravel().tolist())
        print("  dominant error cells: " + ", ".join(f"{k} {v}" for k, v in sorted(counts.items())))


if __name__ == "__main__":
    main()
