"""Compare the analytic metric with the density-matrix simulation of the reference circuit."""

import argparse

import numpy as np

from parityswitch.design.densitymatrix import isolate_terms, simulate_reference_circuit
from parityswitch.design.metric import default_grid, landscape_scan, percentile_mask, performance_metric
from parityswitch.design.noise import CircuitSpec, NoiseModel


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t1-ms", type=float, default=0.5)
    ap.add_argument("--n", type=int, default=60)
    args = ap.parse_args()
    model = NoiseModel(args.t1_ms * 1e-3, args.t1_ms * 1e-3)
    ej, ec = default_grid(args.n)
    land = landscape_scan(ej, ec, model)
    EJ, EC = np.meshgrid(ej, ec)
    dm = simulate_reference_circuit(EJ, EC, model)
    mask = percentile_mask(dm.infidelity, land.percentile)
    print(f"optimal-region overlap: {(mask & land.mask).sum() / land.mask.sum():.1%}")
    n_rep = CircuitSpec().n_repetitions(model.t1_ref)
    for e_j, e_c in [(12.0, 0.2), (20.0, 0.25), (15.0, 0.3)]:
        iso = isolate_terms(e_j, e_c, model)
        ana = performance_metric(e_j, e_c, model).terms
        print(f"(E_J, E_C) = ({e_j}, {e_c}), {n_rep} repetitions")
        for k, v in iso.items():
            print(f"  {k:16s} simulated {float(v):.3e}")
        for k, v in ana.items():
            print(f"  {k:16s} analytic  {float(v):.3e}")


if __name__ == "__main__":
    main()
