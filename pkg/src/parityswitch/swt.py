"""Second-order Schrieffer-Wolff model of the coupler-mediated CZ.

The coupler is eliminated perturbatively, leaving a 5-state model on
{|00>, |01>, |10>, |11>, |02>} with dressed frequencies, anharmonicities and
exchange couplings. Angular frequencies in rad/s, times in seconds.

Phase convention: :func:`effective_phase` follows the closed form
phi(t) = [(a - D) t + pi (1 - sign cos(W t / 2))]/2 + arctan((D - a)/W tan(W t / 2)),
which is the negative of the process-matrix phase
arg U_11 - arg U_01 - arg U_10 + arg U_00 of exp(-i H t).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .coupler import CircuitParams
from .errors import ContractError, SingularDenominatorError
from .spectral import TransmonParams
from .units import GHZ, MHZ

SINGULAR_TOL = 1e-9  # relative to the mode frequency


@dataclass(frozen=True)
class EffectiveParams:
    """Dressed parameters of the reduced 5-state model (rad/s)."""

    omega_q1_t: float
    omega_q2_t: float
    alpha_q1_t: float
    alpha_q2_t: float
    g_0110_t: float
    g_1102_t: float
    delta_t: float
    rabi: float
    omega_c: float = float("nan")
    source: Optional[CircuitParams] = field(default=None, repr=False, compare=False)
    warnings: Tuple[str, ...] = field(default=(), compare=False)

    @staticmethod
    def rabi_from(delta_t, alpha_q2_t, g_1102_t):
        return math.sqrt((delta_t - alpha_q2_t) ** 2 + 4.0 * g_1102_t**2)

    @classmethod
    def from_values(cls, omega_q1_t, omega_q2_t, alpha_q1_t, alpha_q2_t, g_0110_t, g_1102_t):
        d = omega_q1_t - omega_q2_t
        return cls(omega_q1_t, omega_q2_t, alpha_q1_t, alpha_q2_t, g_0110_t, g_1102_t,
                   d, cls.rabi_from(d, alpha_q2_t, g_1102_t))

    @property
    def rabi_period(self) -> float:
        return 2.0 * math.pi / self.rabi

    def hamiltonian(self) -> np.ndarray:
        """5x5 effective Hamiltonian on (00, 01, 10, 11, 02), rad/s."""
        h = np.zeros((5, 5))
        h[1, 1], h[2, 2] = self.omega_q2_t, self.omega_q1_t
        h[1, 2] = h[2, 1] = self.g_0110_t
        h[3, 3] = self.omega_q1_t + self.omega_q2_t
        h[4, 4] = 2 * self.omega_q2_t + self.alpha_q2_t
        h[3, 4] = h[4, 3] = self.g_1102_t
        return h


def _denominator(x, scale, what):
    if abs(x) <= SINGULAR_TOL * scale:
        raise SingularDenominatorError(f"resonant denominator: {what}")
    return x


def swt_parameters(circuit: CircuitParams, omega_c: float, check: bool = True) -> EffectiveParams:
    """Dressed qubit parameters after eliminating the coupler to second order.

    Parameters
    ----------
    circuit : CircuitParams
    omega_c : float
        Coupler frequency (rad/s).
    check : bool
        Attach a warning when g_ic^2 / Delta_ic^2 >= 0.1.
    """
    wq = (circuit.omega_q1, circuit.omega_q2)
    a1, _, a2 = circuit.alphas
    aq = (a1, a2)
    g = circuit.couplings(omega_c)
    gq = (g["q1c"], g["q2c"])
    g12 = g["q1q2"]
    scale = max(wq + (omega_c,))
    notes: List[str] = []

    wt, at, d, s = [], [], [], []
    for k in range(2):
        dk = _denominator(wq[k] - omega_c, scale, f"Delta_q{k + 1}c = 0")
        sk = wq[k] + omega_c
        _denominator(dk + aq[k], scale, f"Delta_q{k + 1}c + alpha_q{k + 1} = 0")
        gg = gq[k] ** 2
        wt.append(wq[k] + gg / dk + 2 * gg / (sk + aq[k]) + gg / sk)
        at.append(aq[k] - 2 * gg / dk + 2 * gg / (dk + aq[k]) + 4 * gg / (sk + aq[k])
                  + gg / sk - 3 * gg / (sk + 2 * aq[k]))
        d.append(dk)
        s.append(sk)
        if check and gg / dk**2 >= 0.1:
            notes.append(f"g_q{k + 1}c^2/Delta^2 = {gg / dk**2:.3g} not small")
    g0110 = g12 + gq[0] * gq[1] / 2 * (1 / d[0] + 1 / d[1] - 1 / s[0] - 1 / s[1])
    g1102 = math.sqrt(2) * (
        g12 + gq[0] * gq[1] / 2 * (1 / d[0] + 1 / (d[1] + a2) - 1 / s[0] - 1 / (s[1] + a2))
    )
    for n in notes:
        warnings.warn(n, stacklevel=2)
    delta = wt[0] - wt[1]
    rabi = EffectiveParams.rabi_from(delta, at[1], g1102)
    return EffectiveParams(wt[0], wt[1], at[0], at[1], g0110, g1102, delta, rabi,
                           omega_c, circuit, tuple(notes))


def effective_p11(params: EffectiveParams, t) -> np.ndarray:
    """|11> population P11(t) = 1 - (2 g~^2/W^2)(1 - cos W t)."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ContractError("time must be non-negative")
    w = params.rabi
    out = 1.0 - 2.0 * params.g_1102_t**2 / w**2 * (1.0 - np.cos(w * t))
    return out if out.ndim else float(out)


def _arg_part(params, t):
    x = 0.5 * params.rabi * t
    k = (params.delta_t - params.alpha_q2_t) / params.rabi
    return np.angle(np.cos(x) + 1j * k * np.sin(x))


def effective_phase(params: EffectiveParams, t, continuous: bool = True):
    """Conditional phase of the reduced model.

    Evaluated as (alpha~ - Delta~) t / 2 + arg(cos x + i k sin x), with
    x = W t / 2 and k = (Delta~ - alpha~)/W, which equals the closed form with
    the sign-unwrapping term. With ``continuous`` the arg part is unwrapped on
    a grid of step <= pi/(8 W) from 0 to t, giving a phase continuous in t.
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0):
        raise ContractError("time must be non-negative")
    lin = 0.5 * (params.alpha_q2_t - params.delta_t) * t_arr
    if not continuous:
        out = lin + _arg_part(params, t_arr)
    else:
        tmax = float(t_arr.max())
        dt = math.pi / (8.0 * params.rabi)
        n = max(2, int(math.ceil(tmax / dt)) + 1)
        grid = np.union1d(np.linspace(0.0, tmax, n), t_arr)
        arg = np.unwrap(_arg_part(params, grid))
        out = lin + np.interp(t_arr, grid, arg)
    return out if np.ndim(t) else float(out[0])


def effective_phase_closed_form(params: EffectiveParams, t):
    """The piecewise closed form with sign() and arctan(), for cross-checks."""
    t = np.asarray(t, dtype=float)
    x = 0.5 * params.rabi * t
    k = (params.delta_t - params.alpha_q2_t) / params.rabi
    return 0.5 * ((params.alpha_q2_t - params.delta_t) * t + np.pi * (1 - np.sign(np.cos(x)))) \
        + np.arctan(k * np.tan(x))


def _shift_alpha_q2(circuit: CircuitParams, h: float) -> CircuitParams:
    q2 = circuit.q2
    w = circuit.omega_q2
    new = TransmonParams.from_frequency(w, -q2.e_c * GHZ + h, q2.n_g, q2.parity)
    return circuit.replace(q2=new)


def _require_source(params):
    if params.source is None or not np.isfinite(params.omega_c):
        raise ContractError("full mode needs parameters produced by swt_parameters")


def phase_susceptibility(
    params: EffectiveParams, t_g: float, mode: str = "simplified", step: float = 0.1 * MHZ,
    rtol: float = 1e-6,
) -> float:
    """d phi / d alpha_q2 at the gate time, in seconds.

    ``simplified`` returns t_g/2 and requires W t_g to be a multiple of 2 pi.
    ``full`` differentiates the closed-form phase, with the dressed parameters
    recomputed for shifted alpha_q2.
    """
    if mode == "simplified":
        n = params.rabi * t_g / (2 * math.pi)
        if round(n) < 1 or abs(n - round(n)) > rtol * max(1.0, n):
            raise ContractError(f"W t_g / 2pi = {n:.6g} is not an integer")
        return t_g / 2.0
    if mode != "full":
        raise ContractError(f"unknown mode {mode!r}")
    _require_source(params)
    vals = []
    for h in (step, -step):
        p = swt_parameters(_shift_alpha_q2(params.source, h), params.omega_c, check=False)
        vals.append(effective_phase(p, t_g))
    return (vals[0] - vals[1]) / (2 * step)


def leakage_susceptibility(params: EffectiveParams, t_g: float, step: float = 0.1 * MHZ) -> float:
    """d^2 P11 / d alpha_q2^2 at fixed t_g, in s^2 (1/(rad/s)^2).

    Uses the dressed parameters recomputed for shifted alpha_q2 when the
    source circuit is known, otherwise shifts alpha~_q2 directly.
    """
    def p11(h):
        if params.source is not None and np.isfinite(params.omega_c):
            p = swt_parameters(_shift_alpha_q2(params.source, h), params.omega_c, check=False)
        else:
            p = EffectiveParams.from_values(params.omega_q1_t, params.omega_q2_t,
                                            params.alpha_q1_t, params.alpha_q2_t + h,
                                            params.g_0110_t, params.g_1102_t)
        return effective_p11(p, t_g)

    return (p11(step) - 2 * p11(0.0) + p11(-step)) / step**2


@dataclass(frozen=True)
class AssumptionCheck:
    name: str
    ratio: float
    passed: bool
    description: str


@dataclass(frozen=True)
class AssumptionReport:
    checks: Tuple[AssumptionCheck, ...]
    threshold: float

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def validate_assumptions(circuit: CircuitParams, omega_c: float, threshold: float = 0.1
                         ) -> AssumptionReport:
    """Numeric margins for the assumptions behind the reduced model.

    Each ratio must be below ``threshold`` to count as "much smaller than".
    The single-excitation separation is checked as W / sqrt(D~^2 + 4 g~01^2):
    the |01>-|10> exchange must be fast and weak compared with the
    |11>-|02> oscillation.
    """
    g = circuit.couplings(omega_c)
    w1, w2 = circuit.omega_q1, circuit.omega_q2
    pert = max(g["q1c"] ** 2 / (w1 - omega_c) ** 2, g["q2c"] ** 2 / (w2 - omega_c) ** 2)
    rwa = max(g["q1c"] / (w1 + omega_c), g["q2c"] / (w2 + omega_c))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        eff = swt_parameters(circuit, omega_c, check=False)
    single = math.sqrt(eff.delta_t**2 + 4 * eff.g_0110_t**2)
    sep = eff.rabi / single
    amp = (float((eff.g_0110_t**2 / single**2) / (eff.g_1102_t**2 / eff.rabi**2))
           if eff.g_1102_t else math.inf)
    checks = (
        AssumptionCheck("perturbativity", pert, pert < threshold, "g_qic^2 / Delta_qic^2"),
        AssumptionCheck("single_excitation_separation", sep, sep < threshold,
                        "Omega / sqrt(Delta~^2 + 4 g~01^2)"),
        AssumptionCheck("single_excitation_amplitude", amp, bool(amp < threshold),
                        "[g~01^2/(Delta~^2+4g~01^2)] / [g~1102^2/Omega^2]"),
        AssumptionCheck("rotating_wave", rwa, rwa < threshold, "g_qic / Sigma_qic"),
    )
    return AssumptionReport(checks, threshold)
