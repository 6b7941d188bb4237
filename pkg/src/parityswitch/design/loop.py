"""One iteration of the measure / re-anchor / rescan design loop."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from ..errors import InvalidParameterError
from .leakage import sqg_leakage
from .metric import Landscape, default_grid, landscape_scan, performance_metric
from .noise import CircuitSpec, NoiseModel


@dataclass
class Proposal:
    """Outcome of one design iteration.

    Attributes
    ----------
    e_j, e_c : float
        Proposed energies of the high-frequency qubit (h*GHz).
    converged : bool
        True when the current design already lies in the optimal region.
    landscape : Landscape
        Rescan with the re-anchored model.
    model : NoiseModel
        Model anchored at the measured coherence of the current design.
    breakdown : dict
        Metric terms at the current design.
    """

    e_j: float
    e_c: float
    converged: bool
    landscape: Landscape
    model: NoiseModel
    breakdown: Dict[str, float]


def reanchor(model: NoiseModel, measured: Dict[str, float], current: Tuple[float, float]) -> NoiseModel:
    """Move the reference point to the current design and its measured coherence.

    The single-qubit leakage curve is held fixed by pinning its anchor at the
    new reference charging energy.
    """
    for key in ("t1", "tphi"):
        if key not in measured:
            raise InvalidParameterError(f"measured coherence needs key {key!r}")
    e_j, e_c = (float(v) for v in current)
    kw = dict(t1_ref=float(measured["t1"]), tphi_ref=float(measured["tphi"]),
              ref_ej=e_j, ref_ec=e_c)
    if model.leakage_gamma != "table":
        kw["leakage_ref"] = float(sqg_leakage(model, e_c))
    if "temperature" in measured and measured["temperature"] is not None:
        kw["temperature"] = float(measured["temperature"])
    return model.replace(**kw)


def optimize_loop(measured: Dict[str, float], current: Tuple[float, float], model: NoiseModel,
                  spec: CircuitSpec = CircuitSpec(), grid: Optional[Tuple[np.ndarray, np.ndarray]] = None,
                  percentile: float = 0.1) -> Proposal:
    """Re-anchor at the measured coherence, rescan and propose the next design.

    The proposal is the log-space centroid of the optimal region, or the
    current design when its grid cell is inside that region.
    """
    new_model = reanchor(model, measured, current)
    ej, ec = default_grid() if grid is None else grid
    land = landscape_scan(ej, ec, new_model, spec, percentile)
    e_j, e_c = (float(v) for v in current)
    res = performance_metric(e_j, e_c, new_model, spec)
    breakdown = {k: float(v) for k, v in res.terms.items()}
    breakdown["one_minus_p"] = float(res.one_minus_p)
    i, j = land.cell_of(e_j, e_c)
    inside = (land.ec[0] <= e_c <= land.ec[-1] and land.ej[0] <= e_j <= land.ej[-1]
              and bool(land.mask[i, j]))
    if inside:
        return Proposal(e_j, e_c, True, land, new_model, breakdown)
    pj, pc = land.masked_centroid()
    return Proposal(pj, pc, False, land, new_model, breakdown)
