"""Error-source scaling with the transmon energies.

Energies are in h*GHz, rates in 1/s and times in s throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Union

import numpy as np
from scipy.integrate import trapezoid
from scipy.special import expit

from ..errors import InvalidParameterError, TuningRangeError
from ..units import GHZ, HBAR, K_B, MHZ

# asymmetry at which the dephasing reference is anchored
REF_ASYMMETRY = 0.9
# idling offset from the flux sweet spot
IDLE_OFFSET = 10 * MHZ


@dataclass(frozen=True)
class NoiseModel:
    """Reference coherence and scaling choices.

    Attributes
    ----------
    t1_ref, tphi_ref : float
        T1 and T_phi at the reference energies (s).
    ref_ej, ref_ec : float
        Reference point (h*GHz).
    temperature : float
        Device temperature (K) for thermal excitation.
    leakage_gamma : float or "table"
        Power-law exponent for single-qubit-gate leakage, or "table" to
        interpolate the DRAG simulation table.
    leakage_ref : float, optional
        Leakage at ``ref_ec`` anchoring the power law; defaults to the table value.
    junction_asymmetry_d : float
        SQUID asymmetry of the tunable qubit (advanced model).
    model_kind : {"basic", "advanced"}
    """

    t1_ref: float
    tphi_ref: float
    ref_ej: float = 12.0
    ref_ec: float = 0.2
    temperature: float = 0.05
    leakage_gamma: Union[float, str] = 5.5
    leakage_ref: Optional[float] = None
    junction_asymmetry_d: float = 0.9
    model_kind: str = "basic"

    def __post_init__(self):
        if not (self.t1_ref > 0 and self.tphi_ref > 0):
            raise InvalidParameterError("reference coherence times must be positive")
        if not self.temperature > 0:
            raise InvalidParameterError("temperature must be positive")
        if self.ref_ej <= 0 or self.ref_ec <= 0:
            raise InvalidParameterError("reference energies must be positive")
        if self.leakage_gamma != "table":
            g = float(self.leakage_gamma)
            if not (5.0 <= g <= 6.0):
                raise InvalidParameterError(f"leakage exponent must lie in [5, 6], got {g}")
        if not (0.0 <= self.junction_asymmetry_d < 1.0):
            raise InvalidParameterError("junction asymmetry must lie in [0, 1)")
        if self.model_kind not in ("basic", "advanced"):
            raise InvalidParameterError(f"unknown model kind {self.model_kind!r}")

    def replace(self, **kw) -> "NoiseModel":
        return replace(self, **kw)


@dataclass(frozen=True)
class CircuitSpec:
    """Reference circuit: per repetition, a pi and a pi/2 rotation on each qubit and one CZ.

    ``weights`` overrides the default term weights (keys ``tqg``, ``sqg_decoherence``,
    ``sqg_leakage``); the state-preparation weight follows from the reference T1.
    """

    t_sqg: float = 16e-9
    t_tqg: float = 50e-9
    weights: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.t_sqg <= 0 or self.t_tqg <= 0:
            raise InvalidParameterError("gate durations must be positive")
        w = {"tqg": 1.0, "sqg_decoherence": 2.0, "sqg_leakage": 1.0}
        unknown = set(self.weights) - set(w)
        if unknown:
            raise InvalidParameterError(f"unknown weight keys {sorted(unknown)}")
        w.update(self.weights)
        object.__setattr__(self, "weights", w)

    def repetition_time(self) -> float:
        return self.t_tqg + 2 * self.t_sqg

    def sp_weight(self, t1_ref: float) -> float:
        """w_SP = 10 (t_TQG + 2 t_SQG) / T1_ref."""
        return 10.0 * self.repetition_time() / t1_ref

    def n_repetitions(self, t1_ref: float) -> int:
        """N = floor(T1_ref / (10 (t_TQG + 2 t_SQG)))."""
        return int(math.floor(t1_ref / (10.0 * self.repetition_time()) + 1e-9))


@dataclass(frozen=True)
class Rates:
    gamma1: np.ndarray
    gamma_phi: np.ndarray


def _pos(*xs):
    for x in xs:
        if np.any(np.asarray(x) <= 0):
            raise InvalidParameterError("energies must be positive")


def scale_rates(model: NoiseModel, e_j, e_c) -> Rates:
    """Gamma_1 ~ E_C^(3/2) E_J^(1/2) and Gamma_phi ~ E_C^(1/2) E_J^(1/2) from the reference."""
    _pos(e_j, e_c)
    e_j = np.asarray(e_j, dtype=float)
    e_c = np.asarray(e_c, dtype=float)
    rj = e_j / model.ref_ej
    rc = e_c / model.ref_ec
    g1 = (1.0 / model.t1_ref) * rc**1.5 * rj**0.5
    gp = (1.0 / model.tphi_ref) * rc**0.5 * rj**0.5
    return Rates(g1, gp)


# --------------------------------------------------------------------------
# flux dependence (split-junction transmon)

def ej_of_flux(e_j_sigma, d, flux):
    """E_J(Phi) = E_JSigma |cos(pi Phi)| sqrt(1 + d^2 tan^2(pi Phi))."""
    c, s = np.cos(np.pi * flux), np.sin(np.pi * flux)
    return e_j_sigma * np.sqrt(c**2 + d**2 * s**2)


def frequency_of_flux(e_j_sigma, e_c, d, flux):
    """Angular frequency (rad/s) sqrt(8 E_C E_J(Phi)) - E_C."""
    return (np.sqrt(8 * e_c * ej_of_flux(e_j_sigma, d, flux)) - e_c) * GHZ


def flux_slope(e_j_sigma, e_c, d, flux):
    """First-order flux dispersion (d - 1) sqrt(8 E_C E_JSigma) pi sin(2 pi Phi)/2, in GHz per flux quantum."""
    return (d - 1.0) * np.sqrt(8 * e_c * e_j_sigma) * np.pi * np.sin(2 * np.pi * flux) / 2.0


def flux_for_shift(e_j_sigma, e_c, d, shift, strict: bool = True):
    """Flux bias in [0, 1/2] lowering the frequency by ``shift`` (rad/s) from the sweet spot.

    Closed form: with q = (w_max - shift + E_C)/sqrt(8 E_C E_JSigma),
    sin^2(pi Phi) = (1 - q^4)/(1 - d^2). Unreachable shifts raise
    TuningRangeError, or give NaN when ``strict`` is False.
    """
    shift = np.asarray(shift, dtype=float)
    if np.any(shift < 0):
        raise InvalidParameterError("frequency shift must be non-negative")
    w0 = frequency_of_flux(e_j_sigma, e_c, d, 0.0)
    w_min = frequency_of_flux(e_j_sigma, e_c, d, 0.5)
    bad = shift > (w0 - w_min) * (1 + 1e-12)
    if strict and np.any(bad):
        rng = np.min(np.asarray(w0 - w_min)) / GHZ * 1e3
        raise TuningRangeError(
            f"frequency shift of {np.max(shift) / GHZ * 1e3:.1f} MHz exceeds the "
            f"{rng:.1f} MHz tuning range for d={d}"
        )
    q = ((w0 - shift) / GHZ + e_c) / np.sqrt(8 * e_c * e_j_sigma)
    s2 = np.clip((1.0 - q**4) / (1.0 - d**2), 0.0, 1.0)
    out = np.where(bad, np.nan, np.arcsin(np.sqrt(s2)) / np.pi)
    return out if np.ndim(out) else float(out)


def _reference_slope(model: NoiseModel) -> float:
    ej_sigma = model.ref_ej  # the reference qubit's junction energy at its sweet spot
    phi = flux_for_shift(ej_sigma, model.ref_ec, REF_ASYMMETRY, IDLE_OFFSET)
    return abs(flux_slope(ej_sigma, model.ref_ec, REF_ASYMMETRY, phi))


def flux_dephasing_advanced(model: NoiseModel, e_j_sigma, e_c, flux_bias) -> float:
    """Dephasing rate proportional to the first-order flux dispersion.

    Gamma_phi = |dw/dPhi| / |dw/dPhi|_ref / tphi_ref with the reference slope
    taken at the reference energies, asymmetry REF_ASYMMETRY and a bias 10 MHz
    below the sweet spot.
    """
    _pos(e_j_sigma, e_c)
    d = model.junction_asymmetry_d
    if d >= 1:
        raise InvalidParameterError("junction asymmetry must be < 1")
    slope = np.abs(flux_slope(e_j_sigma, e_c, d, flux_bias))
    return slope / _reference_slope(model) / model.tphi_ref


def flux_averaged_dephasing(model: NoiseModel, e_j_sigma, e_c, n: int = 2001):
    """Flux-averaged first-order rate; scales as sqrt(E_C E_JSigma)."""
    phi = np.linspace(0.0, 1.0, n)
    vals = flux_dephasing_advanced(model, e_j_sigma, e_c, phi)
    return float(trapezoid(vals, phi))


# --------------------------------------------------------------------------
# thermal excitation

def thermal_excitation(omega, temperature: float):
    """Excited-state population e^(-x)/(1 + e^(-x)), x = hbar omega / (k_B T)."""
    if temperature <= 0:
        raise InvalidParameterError("temperature must be positive")
    x = HBAR * np.asarray(omega, dtype=float) / (K_B * temperature)
    out = expit(-x)
    return out if np.ndim(out) else float(out)


def transmon_omega(e_j, e_c):
    """Asymptotic qubit frequency (rad/s)."""
    return (np.sqrt(8.0 * np.asarray(e_j) * np.asarray(e_c)) - np.asarray(e_c)) * GHZ
