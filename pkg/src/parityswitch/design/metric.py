"""Performance metric 1 - P over (E_J, E_C) of the high-frequency qubit.

Each term is reported separately. The low-frequency qubit follows from the
high-frequency one: in the basic model w_q1 = w_q2 + alpha_q2 + 10 MHz and
alpha_q1 = alpha_q2 + 10 MHz; in the advanced model q1 idles at
w_q2 + alpha_q2/2 and is flux-tuned to w_q2 + alpha_q2 during the CZ.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple

import numpy as np

from ..units import GHZ
from .leakage import sqg_leakage
from .noise import (
    IDLE_OFFSET,
    CircuitSpec,
    NoiseModel,
    flux_dephasing_advanced,
    flux_for_shift,
    scale_rates,
    thermal_excitation,
    transmon_omega,
)

TERMS = ("parity", "t1_tqg", "tphi_tqg", "sqg_t1", "sqg_tphi", "leak", "thermal")
GROUPS = {
    "decoherence": ("t1_tqg", "tphi_tqg", "sqg_t1", "sqg_tphi"),
    "leakage": ("leak",),
    "parity": ("parity",),
    "thermal": ("thermal",),
}
LABELS = ("decoherence", "leakage", "parity", "thermal")  # tie-break order
INFEASIBLE = "infeasible"

BASIC_COEFFICIENTS = {
    "t1_tqg": Fraction(2, 5),
    "tphi_tqg": Fraction(1, 5),
    "parity": Fraction(3, 80),
    "sqg_t1": Fraction(1, 3),
    "sqg_tphi": Fraction(1, 6),
    "leak": Fraction(1, 3),
}
ADVANCED_COEFFICIENTS = {
    "t1_q1": Fraction(3, 10),
    "t1_q2": Fraction(1, 2),
    "tphi_q1": Fraction(3, 8),
    "tphi_q2": Fraction(31, 40),
}
DETUNING_MARGIN = 0.010  # h*GHz, Table-1 offset between the qubits
WORKERS_ENV = "PARITYSWITCH_WORKERS"


def eps2_asymptotic(e_j, e_c):
    """|eps_2| (h*GHz) from the asymptotic formula, vectorized."""
    e_j = np.asarray(e_j, dtype=float)
    e_c = np.asarray(e_c, dtype=float)
    r = e_j / e_c
    return e_c * 2.0**13 / 2.0 * math.sqrt(2 / math.pi) * (r / 2) ** 1.75 * np.exp(-np.sqrt(8 * r))


def parity_term(e_j, e_c, t_tqg: float, eps2=None):
    """(3/80) (t_TQG eps_2 / (2 hbar))^2 with eps_2 of the high-frequency qubit."""
    if eps2 is None:
        eps2 = eps2_asymptotic(e_j, e_c)
    x = t_tqg * np.asarray(eps2) * GHZ / 2.0
    out = float(BASIC_COEFFICIENTS["parity"]) * x**2
    return out if np.ndim(out) else float(out)


def partner_qubit(e_j, e_c, kind: str = "basic"):
    """(E_J, E_C) of the low-frequency qubit; E_J is the sweet-spot E_JSigma when advanced."""
    e_j = np.asarray(e_j, dtype=float)
    e_c = np.asarray(e_c, dtype=float)
    w2 = np.sqrt(8 * e_j * e_c) - e_c
    ec1 = e_c - DETUNING_MARGIN
    if np.any(ec1 <= 0):
        raise ValueError("E_C too small for the partner-qubit convention")
    if kind == "basic":
        w1 = w2 - e_c + DETUNING_MARGIN
    else:
        w1 = w2 - e_c / 2 + IDLE_OFFSET / GHZ  # sweet spot sits 10 MHz above idle
    return (w1 + ec1) ** 2 / (8 * ec1), ec1


@dataclass
class MetricResult:
    """1 - P and its per-term breakdown (arrays broadcast over the inputs)."""

    one_minus_p: np.ndarray
    terms: Dict[str, np.ndarray]
    model_kind: str

    def grouped(self) -> Dict[str, np.ndarray]:
        return {g: sum(self.terms[t] for t in ts) for g, ts in GROUPS.items()}

    def dominant(self) -> np.ndarray:
        """Largest error group per cell; "infeasible" where the metric is undefined."""
        g = self.grouped()
        stack = np.stack([np.asarray(g[k], dtype=float) for k in LABELS])
        idx = np.argmax(np.nan_to_num(stack, nan=-np.inf), axis=0)  # first maximum wins ties
        ok = np.isfinite(np.asarray(self.one_minus_p, dtype=float))
        return np.where(ok, np.asarray(LABELS, dtype=object)[idx], INFEASIBLE).astype(object)


@dataclass
class ErrorInputs:
    """Physical per-qubit error parameters entering the metric (index 0: q1, 1: q2)."""

    gamma1: Tuple[np.ndarray, np.ndarray]
    gamma_phi: Tuple[np.ndarray, np.ndarray]
    leak: Tuple[np.ndarray, np.ndarray]
    p_excited: Tuple[np.ndarray, np.ndarray]
    delta_phi: np.ndarray
    gamma_phi_gate_q1: Optional[np.ndarray] = None


def error_inputs(e_j, e_c, model: NoiseModel, spec: CircuitSpec = CircuitSpec(),
                 strict: bool = True) -> ErrorInputs:
    """Rates, leakage, thermal populations and parity phase split at (E_J, E_C) of q2.

    In the advanced model q1 must reach the gate detuning; unreachable points
    raise TuningRangeError, or carry NaN when ``strict`` is False.
    """
    e_j = np.asarray(e_j, dtype=float)
    e_c = np.asarray(e_c, dtype=float)
    ej1, ec1 = partner_qubit(e_j, e_c, model.model_kind)
    r1, r2 = scale_rates(model, ej1, ec1), scale_rates(model, e_j, e_c)
    gphi_gate = None
    if model.model_kind == "advanced":
        # q1 is lowered by |alpha_q2|/2 from idle for the gate
        shift = IDLE_OFFSET + e_c / 2 * GHZ
        phi_gate = flux_for_shift(ej1, ec1, model.junction_asymmetry_d, shift, strict)
        gphi_gate = flux_dephasing_advanced(model, ej1, ec1, phi_gate)
    p1 = tuple(thermal_excitation(transmon_omega(a, b), model.temperature)
               for a, b in ((ej1, ec1), (e_j, e_c)))
    return ErrorInputs(
        gamma1=(r1.gamma1, r2.gamma1),
        gamma_phi=(r1.gamma_phi, r2.gamma_phi),
        leak=(sqg_leakage(model, ec1), sqg_leakage(model, e_c)),
        p_excited=p1,
        delta_phi=spec.t_tqg * eps2_asymptotic(e_j, e_c) * GHZ / 2.0,
        gamma_phi_gate_q1=gphi_gate,
    )


def performance_metric(e_j, e_c, model: NoiseModel, spec: CircuitSpec = CircuitSpec(),
                       strict: bool = True) -> MetricResult:
    """Weighted sum of two-qubit, single-qubit and state-preparation infidelities.

    ``strict=False`` marks designs outside the flux tuning range with NaN
    instead of raising.
    """
    x = error_inputs(e_j, e_c, model, spec, strict)
    w = spec.weights
    c = {k: float(v) for k, v in BASIC_COEFFICIENTS.items()}
    t2, t1 = spec.t_tqg, spec.t_sqg
    g1, gp = x.gamma1, x.gamma_phi
    terms: Dict[str, np.ndarray] = {}
    terms["parity"] = w["tqg"] * c["parity"] * x.delta_phi**2
    if model.model_kind == "basic":
        terms["t1_tqg"] = w["tqg"] * c["t1_tqg"] * (g1[0] + g1[1]) * t2
        terms["tphi_tqg"] = w["tqg"] * c["tphi_tqg"] * (gp[0] + gp[1]) * t2
    else:
        a = {k: float(v) for k, v in ADVANCED_COEFFICIENTS.items()}
        terms["t1_tqg"] = w["tqg"] * (a["t1_q1"] * g1[0] + a["t1_q2"] * g1[1]) * t2
        terms["tphi_tqg"] = w["tqg"] * (a["tphi_q1"] * x.gamma_phi_gate_q1
                                        + a["tphi_q2"] * gp[1]) * t2
    terms["sqg_t1"] = w["sqg_decoherence"] * c["sqg_t1"] * (g1[0] + g1[1]) * t1
    terms["sqg_tphi"] = w["sqg_decoherence"] * c["sqg_tphi"] * (gp[0] + gp[1]) * t1
    terms["leak"] = w["sqg_leakage"] * c["leak"] * (x.leak[0] + x.leak[1])
    terms["thermal"] = spec.sp_weight(model.t1_ref) * (x.p_excited[0] + x.p_excited[1])
    shape = np.broadcast(np.asarray(e_j), np.asarray(e_c)).shape
    terms = {k: np.broadcast_to(np.asarray(v, dtype=float), shape).copy() for k, v in terms.items()}
    total = sum(terms[k] for k in TERMS)
    return MetricResult(total, terms, model.model_kind)


# --------------------------------------------------------------------------
# landscape

@dataclass
class Landscape:
    """Metric over a rectangular grid; arrays have shape (n_ec, n_ej)."""

    ej: np.ndarray
    ec: np.ndarray
    one_minus_p: np.ndarray
    terms: Dict[str, np.ndarray]
    mask: np.ndarray
    dominant: np.ndarray
    percentile: float

    def cell_of(self, e_j: float, e_c: float) -> Tuple[int, int]:
        """Nearest grid cell in log coordinates."""
        i = int(np.argmin(np.abs(np.log(self.ec) - math.log(e_c))))
        j = int(np.argmin(np.abs(np.log(self.ej) - math.log(e_j))))
        return i, j

    def masked_centroid(self) -> Tuple[float, float]:
        """Geometric-mean (E_J, E_C) of the masked cells."""
        EJ, EC = np.meshgrid(self.ej, self.ec)
        return (float(np.exp(np.mean(np.log(EJ[self.mask])))),
                float(np.exp(np.mean(np.log(EC[self.mask])))))


def percentile_mask(values: np.ndarray, percentile: float) -> np.ndarray:
    """Cells among the lowest ``percentile`` fraction of finite values (ties broken by flat index)."""
    if not (0.0 < percentile < 1.0):
        raise ValueError("percentile must lie in (0, 1)")
    flat = np.asarray(values, dtype=float).ravel()
    n_ok = int(np.isfinite(flat).sum())
    k = max(1, int(round(percentile * n_ok))) if n_ok else 0
    order = np.argsort(flat, kind="stable")
    mask = np.zeros(flat.size, dtype=bool)
    mask[order[:k]] = True
    return mask.reshape(np.shape(values))


def default_grid(n: int = 60, ej_range=(4.0, 40.0), ec_range=(0.1, 0.5)):
    return np.geomspace(*ej_range, n), np.geomspace(*ec_range, n)


def _rows(args):
    ej, ec_rows, model, spec = args
    EJ, EC = np.meshgrid(ej, ec_rows)
    res = performance_metric(EJ, EC, model, spec, strict=False)
    return res.one_minus_p, res.terms


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def landscape_scan(ej: np.ndarray, ec: np.ndarray, model: NoiseModel,
                   spec: CircuitSpec = CircuitSpec(), percentile: float = 0.1,
                   workers: Optional[int] = None) -> Landscape:
    """Evaluate the metric on the grid, mask the best cells and label the dominant error.

    Cells where the design is infeasible (advanced model outside the flux
    tuning range) are NaN, labeled "infeasible" and never masked.

    Rows of E_C are split across ``workers`` processes (environment variable
    PARITYSWITCH_WORKERS by default); results are reassembled in grid order.
    """
    ej = np.asarray(ej, dtype=float)
    ec = np.asarray(ec, dtype=float)
    workers = worker_count() if workers is None else max(1, int(workers))
    chunks = [c for c in np.array_split(ec, min(workers, len(ec))) if len(c)]
    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_rows, [(ej, c, model, spec) for c in chunks]))
    else:
        parts = [_rows((ej, c, model, spec)) for c in chunks]
    total = np.concatenate([p[0] for p in parts], axis=0)
    terms = {k: np.concatenate([p[1][k] for p in parts], axis=0) for k in TERMS}
    res = MetricResult(total, terms, model.model_kind)
    return Landscape(ej, ec, total, terms, percentile_mask(total, percentile), res.dominant(),
                     percentile)
