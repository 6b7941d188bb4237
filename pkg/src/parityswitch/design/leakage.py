"""Single-qubit-gate leakage from a three-level DRAG simulation.

A resonant Gaussian pi pulse (sigma = 4 ns, duration 4 sigma, edges
subtracted) with a derivative quadrature is simulated on the lowest three
transmon levels in the rotating frame. Both quadrature amplitudes are
optimized; the leakage is the |2> population after the pulse starting in |0>.
"""

from __future__ import annotations

import math
import warnings
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import minimize

from ..errors import InvalidParameterError
from ..units import GHZ

SIGMA_NS = 4.0
DURATION_NS = 16.0
N_STEPS = 160
TABLE_EC = tuple(np.round(np.linspace(0.08, 0.6, 27), 4))

_A = np.diag(np.sqrt([1.0, 2.0]), 1)
_HX = 0.5 * (_A + _A.T)
_HY = 0.5j * (_A.T - _A)


def drag_propagator(amp: float, drag: float, alpha_rad_ns: float, sigma: float = SIGMA_NS,
                    duration: float = DURATION_NS, n_steps: int = N_STEPS) -> np.ndarray:
    """3x3 propagator of the DRAG pulse (rad/ns units, midpoint rule)."""
    h = duration / n_steps
    t = (np.arange(n_steps) + 0.5) * h - duration / 2
    gauss = np.exp(-(t**2) / (2 * sigma**2))
    env = gauss - math.exp(-((duration / 2) ** 2) / (2 * sigma**2))
    denv = -t / sigma**2 * gauss
    ox = amp * env
    oy = -drag * amp * denv / alpha_rad_ns
    hs = (np.diag([0.0, 0.0, alpha_rad_ns])[None]
          + ox[:, None, None] * _HX[None] + oy[:, None, None] * _HY[None])
    e, v = np.linalg.eigh(hs)
    steps = np.einsum("kij,kj,klj->kil", v, np.exp(-1j * e * h), v.conj())
    u = np.eye(3, dtype=complex)
    for s in steps:
        u = s @ u
    return u


def _pi_infidelity(x, alpha):
    u = drag_propagator(x[0], x[1], alpha)
    m = u[:2, :2]
    # target X up to a relative Z phase (removed virtually)
    tr2 = (abs(m[0, 1]) + abs(m[1, 0])) ** 2
    leak = 1.0 - float(np.real(np.trace(m @ m.conj().T))) / 2
    return 1.0 - (tr2 / 2 + 1.0 - leak) / 3.0


@lru_cache(maxsize=256)
def drag_leakage(e_c: float) -> float:
    """Optimized-DRAG leakage P(|0> -> |2>) for anharmonicity -E_C (h*GHz)."""
    if e_c <= 0:
        raise InvalidParameterError("charging energy must be positive")
    alpha = -e_c * GHZ * 1e-9
    h = DURATION_NS / N_STEPS
    t = (np.arange(N_STEPS) + 0.5) * h - DURATION_NS / 2
    area = np.sum(np.exp(-(t**2) / (2 * SIGMA_NS**2))
                  - math.exp(-((DURATION_NS / 2) ** 2) / (2 * SIGMA_NS**2))) * h
    x0 = np.array([math.pi / area, 0.5])
    res = minimize(_pi_infidelity, x0, args=(alpha,), method="Nelder-Mead",
                   options=dict(xatol=1e-9, fatol=1e-15, maxiter=2000))
    u = drag_propagator(res.x[0], res.x[1], alpha)
    return float(abs(u[2, 0]) ** 2)


@lru_cache(maxsize=2)
def leakage_table(recompute: bool = False) -> Tuple[np.ndarray, np.ndarray]:
    """(E_C grid, leakage) of the DRAG simulation; the packaged copy unless ``recompute``."""
    if recompute:
        ec = np.array(TABLE_EC, dtype=float)
        return ec, np.array([drag_leakage(float(x)) for x in ec])
    from ._drag_table import TABLE

    arr = np.array(TABLE, dtype=float)
    return arr[:, 0], arr[:, 1]


@lru_cache(maxsize=1)
def _spline():
    ec, p = leakage_table()
    return CubicSpline(np.log(ec), np.log(p))


def table_leakage(e_c):
    """Log-log cubic interpolation of the DRAG table; warns when extrapolating."""
    e_c = np.asarray(e_c, dtype=float)
    ec, _ = leakage_table()
    if np.any(e_c < ec[0] * (1 - 1e-12)) or np.any(e_c > ec[-1] * (1 + 1e-12)):
        warnings.warn(
            f"leakage table covers E_C in [{ec[0]}, {ec[-1]}] GHz; extrapolating", stacklevel=2
        )
    out = np.exp(_spline()(np.log(e_c)))
    return out if out.ndim else float(out)


def fit_exponent(e_min: float = 0.15, e_max: float = 0.35, n: int = 9) -> float:
    """Least-squares gamma of P_leak ~ E_C^-gamma over [e_min, e_max] from direct simulations."""
    ec = np.geomspace(e_min, e_max, n)
    p = np.array([drag_leakage(float(round(x, 6))) for x in ec])
    slope = np.polyfit(np.log(ec), np.log(p), 1)[0]
    return float(-slope)


def sqg_leakage(model, e_c):
    """Single-qubit-gate leakage for the model's mode.

    Power-law mode: P = P_ref (E_C / E_C,ref)^(-gamma), anchored at ``leakage_ref``
    (the table value at the reference E_C when unset). Table mode: interpolation.
    The table has an interference dip near E_C = 0.14 GHz, so only the power
    law is monotone.
    """
    if np.any(np.asarray(e_c) <= 0):
        raise InvalidParameterError("charging energy must be positive")
    if model.leakage_gamma == "table":
        return table_leakage(e_c)
    ref = model.leakage_ref if model.leakage_ref is not None else table_leakage(model.ref_ec)
    out = ref * (np.asarray(e_c, dtype=float) / model.ref_ec) ** (-float(model.leakage_gamma))
    return out if np.ndim(out) else float(out)
