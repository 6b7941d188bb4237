"""Two-branch Kraus channel for a conditional-phase gate under parity switching.

Each parity branch applies a diagonal gate with conditional phase
phi0 +/- delta_phi/2 and a reduced |11> amplitude sqrt(1 - delta_p11/4).
The branches are weighted by the parity occupation probabilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.special import comb

from .errors import InvalidParameterError, ValidationError
from .units import GHZ

D = 4


@dataclass(frozen=True)
class ParityChannel:
    """Parity-switch channel parameters.

    Attributes
    ----------
    phi0 : float
        Target conditional phase (rad).
    delta_phi : float
        Phase split between the two parity branches (rad).
    delta_p11 : float
        Non-negative |11> population deficit parameter, 0 <= delta_p11 < 1.
    p_plus : float
        Probability of the even-parity branch.
    """

    phi0: float = math.pi
    delta_phi: float = 0.0
    delta_p11: float = 0.0
    p_plus: float = 0.5

    def __post_init__(self):
        if not (0.0 <= self.delta_p11 < 1.0):
            raise InvalidParameterError(f"delta_p11 must lie in [0, 1), got {self.delta_p11}")
        if not (0.0 <= self.p_plus <= 1.0):
            raise InvalidParameterError(f"p_plus must lie in [0, 1], got {self.p_plus}")
        if not (np.isfinite(self.phi0) and np.isfinite(self.delta_phi)):
            raise InvalidParameterError("phases must be finite")

    @property
    def trace_factor(self) -> float:
        """Largest eigenvalue of sum_i U_i^dag U_i (equals 1 iff no leakage)."""
        s = kraus_operators(self)
        return float(np.max(np.linalg.eigvalsh(sum(k.conj().T @ k for k in s))))


def target_cphase(phi0: float) -> np.ndarray:
    return np.diag([1.0, 1.0, 1.0, np.exp(1j * phi0)])


def kraus_operators(ch: ParityChannel) -> Tuple[np.ndarray, np.ndarray]:
    """(U_+, U_-): diagonal Kraus operators of the parity channel."""
    amp = math.sqrt(1.0 - ch.delta_p11 / 4.0)
    out = []
    for sign, w in ((1, ch.p_plus), (-1, 1.0 - ch.p_plus)):
        d = np.array([1.0, 1.0, 1.0, amp * np.exp(1j * (ch.phi0 + sign * ch.delta_phi / 2))])
        out.append(math.sqrt(w) * np.diag(d))
    return out[0], out[1]


def kraus_fidelity(kraus, target: np.ndarray) -> float:
    """Average gate fidelity with leakage for a set of Kraus operators (d = 4)."""
    tr2 = sum(abs(np.trace(target.conj().T @ k)) ** 2 for k in kraus)
    kk = sum(k @ k.conj().T for k in kraus)
    leak = 1.0 - float(np.real(np.trace(target.conj().T @ kk @ target))) / D
    return float((tr2 / D + 1.0 - leak) / (D + 1))


@dataclass(frozen=True)
class ChannelFidelity:
    exact: float
    quadratic: float


def channel_fidelity(ch: ParityChannel) -> ChannelFidelity:
    """Exact fidelity and its small-error expansion.

    The expansion is 1 - (3/80) delta_phi^2 - delta_p11/16. Because the target
    phase sits midway between the branches, the single-gate fidelity does not
    depend on ``p_plus``.
    """
    exact = kraus_fidelity(kraus_operators(ch), target_cphase(ch.phi0))
    quad = 1.0 - (3.0 / 80.0) * ch.delta_phi**2 - ch.delta_p11 / 16.0
    return ChannelFidelity(exact, quad)


@dataclass(frozen=True)
class NGateFidelity:
    exact: float
    linear: float


def n_gate_infidelity(ch: ParityChannel, n: int) -> NGateFidelity:
    """Infidelity of n sequential gates (phase-only channel).

    The n-fold map is a binomial mixture of products U_-^k U_+^(n-k). Returns
    the exact binomial-sum infidelity and the linear form
    (3/80) delta_phi^2 E[(n - 2k)^2] (= (3/80) n delta_phi^2 for equal weights).
    """
    if ch.delta_p11 != 0.0:
        raise ValidationError("the n-gate result is defined for delta_p11 = 0 only")
    if n < 0:
        raise ValidationError("n must be non-negative")
    if n == 0:
        return NGateFidelity(0.0, 0.0)
    k = np.arange(n + 1)
    p, q = ch.p_plus, 1.0 - ch.p_plus
    w = comb(n, k) * (q**k) * (p ** (n - k))
    theta = ch.delta_phi / 2 * (n - 2 * k)
    # |tr(U_target^dag^n U_-^k U_+^(n-k))|^2 = |3 + e^{i theta}|^2 = 10 + 6 cos(theta)
    f = (D + np.sum(w * (10.0 + 6.0 * np.cos(theta)))) / (D * D + D)
    second = 4 * n * p * q + (n * (p - q)) ** 2
    return NGateFidelity(float(1.0 - f), float(3.0 / 80.0 * ch.delta_phi**2 * second))


def qp_decoherence_bound(t_parity: float, gate_duration: float) -> float:
    """Worst-case per-qubit infidelity from quasiparticle-induced relaxation.

    Each parity switch is counted as an energy-relaxation event with
    Gamma_1 = 2/T_P, entering the two-qubit amplitude-damping infidelity
    (2/5) Gamma_1 t_g.
    """
    if t_parity <= 0:
        raise InvalidParameterError("parity lifetime must be positive")
    if gate_duration < 0:
        raise InvalidParameterError("gate duration must be non-negative")
    if math.isinf(t_parity):
        return 0.0
    return 0.4 * (2.0 / t_parity) * gate_duration


def phase_split_from_dispersion(eps2_ghz: float, t_g: float, n_g: float = 0.0) -> float:
    """delta_phi = (t_g/2) eps_2 cos(2 pi n_g) in the resonant, weak-coupling limit."""
    return 0.5 * t_g * eps2_ghz * GHZ * math.cos(2 * math.pi * n_g)
