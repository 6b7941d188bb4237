"""Single-transmon spectra with charge parity.

The charge-basis Hamiltonian

    H = 4 E_C (n - n_g + (P - 1)/4)^2 - E_J cos(phi)

is tridiagonal in the charge states |n>, n in [-N, N], so the low-lying
levels are obtained with a tridiagonal eigen-solver. The odd parity
(P = -1) is equivalent to shifting the offset charge by one half.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from .errors import ConfigurationError, DomainError, InvalidParameterError
from .units import GHZ

DEFAULT_CUTOFF = 30


@dataclass(frozen=True)
class TransmonParams:
    """Parameters of one transmon.

    Attributes
    ----------
    e_j, e_c : float
        Josephson and charging energies in h*GHz.
    n_g : float
        Offset charge, reduced modulo 1.
    parity : int
        Charge parity, +1 or -1.
    """

    e_j: float
    e_c: float
    n_g: float = 0.0
    parity: int = 1

    def __post_init__(self):
        if not (np.isfinite(self.e_j) and np.isfinite(self.e_c)):
            raise InvalidParameterError("energies must be finite")
        if self.e_j <= 0 or self.e_c <= 0:
            raise InvalidParameterError(
                f"energies must be positive, got e_j={self.e_j}, e_c={self.e_c}"
            )
        if self.parity not in (-1, 1):
            raise InvalidParameterError(f"parity must be +1 or -1, got {self.parity}")
        object.__setattr__(self, "n_g", float(self.n_g) % 1.0)

    @property
    def ratio(self) -> float:
        return self.e_j / self.e_c

    @classmethod
    def from_frequency(cls, omega: float, alpha: float, n_g: float = 0.0, parity: int = 1):
        """Invert the transmon relations omega = sqrt(8 E_J E_C) - E_C, alpha = -E_C.

        ``omega`` and ``alpha`` are angular frequencies in rad/s.
        """
        if alpha >= 0:
            raise InvalidParameterError("transmon anharmonicity must be negative")
        e_c = -alpha / GHZ
        f = omega / GHZ
        e_j = (f + e_c) ** 2 / (8.0 * e_c)
        return cls(e_j=e_j, e_c=e_c, n_g=n_g, parity=parity)

    def with_parity(self, parity: int) -> "TransmonParams":
        return TransmonParams(self.e_j, self.e_c, self.n_g, parity)


@dataclass(frozen=True)
class TransmonSpectrum:
    """Lowest eigenenergies (h*GHz) of the charge-basis Hamiltonian."""

    levels: np.ndarray
    params: TransmonParams
    charge_cutoff: int

    def __post_init__(self):
        lv = np.asarray(self.levels, dtype=float)
        if not np.all(np.isfinite(lv)):
            raise ConfigurationError("non-finite eigenvalue")
        if np.any(np.diff(lv) <= 0):
            raise ConfigurationError("levels are not strictly increasing")
        object.__setattr__(self, "levels", lv)

    @property
    def transition_frequencies(self) -> np.ndarray:
        """E_m - E_0 in h*GHz."""
        return self.levels - self.levels[0]


@dataclass(frozen=True)
class DuffingParams:
    """Parity-split Duffing oscillator, all angular frequencies in rad/s."""

    omega: float
    alpha: float
    delta_omega: float = 0.0
    delta_alpha: float = 0.0
    notes: tuple = field(default=(), compare=False)

    @property
    def omega_eff(self) -> float:
        return self.omega + self.delta_omega

    @property
    def alpha_eff(self) -> float:
        return self.alpha + self.delta_alpha


def _charge_diagonal(e_c, n_g, parity, charge_cutoff):
    n = np.arange(-charge_cutoff, charge_cutoff + 1, dtype=float)
    return 4.0 * e_c * (n - n_g + (parity - 1) / 4.0) ** 2


def diagonalize_charge_basis(
    params: TransmonParams, n_levels: int = 6, charge_cutoff: int = DEFAULT_CUTOFF
) -> TransmonSpectrum:
    """Lowest ``n_levels`` eigenvalues of the transmon in the charge basis.

    Parameters
    ----------
    params : TransmonParams
    n_levels : int
        Number of levels returned (m = 0 .. n_levels - 1).
    charge_cutoff : int
        Charge states n in [-charge_cutoff, charge_cutoff] are kept.

    Returns
    -------
    TransmonSpectrum
    """
    if charge_cutoff < 20:
        raise ConfigurationError(f"charge_cutoff must be >= 20, got {charge_cutoff}")
    if n_levels < 1 or n_levels > 2 * charge_cutoff - 2:
        raise ConfigurationError(
            f"n_levels={n_levels} incompatible with charge_cutoff={charge_cutoff}"
        )
    d = _charge_diagonal(params.e_c, params.n_g, params.parity, charge_cutoff)
    e = np.full(d.size - 1, -params.e_j / 2.0)
    levels = eigvalsh_tridiagonal(d, e, select="i", select_range=(0, n_levels - 1))
    return TransmonSpectrum(np.sort(levels), params, charge_cutoff)


def _check_ratio(e_j, e_c):
    if e_j <= 0 or e_c <= 0:
        raise InvalidParameterError("energies must be positive")
    r = e_j / e_c
    if r < 1:
        raise DomainError(f"E_J/E_C = {r:.3g} < 1: asymptotic dispersion meaningless")
    return r


def charge_dispersion_asymptotic(e_j: float, e_c: float, m: int) -> float:
    """Asymptotic charge dispersion of level ``m`` in h*GHz (signed, (-1)^m).

    eps_m = (-1)^m E_C 2^(4m+5)/m! sqrt(2/pi) (E_J/2E_C)^(m/2+3/4) exp(-sqrt(8 E_J/E_C))
    """
    if m < 0:
        raise DomainError("level index must be non-negative")
    r = _check_ratio(e_j, e_c)
    if r < 20:
        warnings.warn(f"E_J/E_C = {r:.3g} is outside the asymptotic regime", stacklevel=2)
    pref = (-1) ** m * e_c * 2.0 ** (4 * m + 5) / math.factorial(m) * math.sqrt(2 / math.pi)
    return pref * (r / 2.0) ** (m / 2.0 + 0.75) * math.exp(-math.sqrt(8.0 * r))


def charge_dispersion_exact(
    e_j: float,
    e_c: float,
    m: int,
    charge_cutoff: int = DEFAULT_CUTOFF,
    method: Literal["offset", "parity"] = "offset",
) -> float:
    """Charge dispersion of level ``m`` from exact diagonalization, h*GHz.

    Defined with the sign convention of the asymptotic formula:
    ``E_m(n_g=1/2) - E_m(n_g=0)`` at even parity ("offset"), or equivalently
    ``E_m(P=-1, n_g=0) - E_m(P=+1, n_g=0)`` ("parity").
    """
    _check_ratio(e_j, e_c)
    n = m + 1
    if method == "offset":
        hi = diagonalize_charge_basis(TransmonParams(e_j, e_c, 0.5, 1), n, charge_cutoff)
        lo = diagonalize_charge_basis(TransmonParams(e_j, e_c, 0.0, 1), n, charge_cutoff)
    elif method == "parity":
        hi = diagonalize_charge_basis(TransmonParams(e_j, e_c, 0.0, -1), n, charge_cutoff)
        lo = diagonalize_charge_basis(TransmonParams(e_j, e_c, 0.0, 1), n, charge_cutoff)
    else:
        raise ConfigurationError(f"unknown method {method!r}")
    return float(hi.levels[m] - lo.levels[m])


def parity_averaged_levels(e_j: float, e_c: float, n_g: float = 0.0, n_levels: int = 4,
                           charge_cutoff: int = DEFAULT_CUTOFF) -> np.ndarray:
    """Mean of the two parity spectra, h*GHz."""
    p = diagonalize_charge_basis(TransmonParams(e_j, e_c, n_g, 1), n_levels, charge_cutoff)
    q = diagonalize_charge_basis(TransmonParams(e_j, e_c, n_g, -1), n_levels, charge_cutoff)
    return 0.5 * (p.levels + q.levels)


def transmon_frequency_ghz(e_j, e_c):
    """Asymptotic 0-1 transition frequency sqrt(8 E_J E_C) - E_C in GHz."""
    return np.sqrt(8.0 * np.asarray(e_j) * np.asarray(e_c)) - np.asarray(e_c)


def duffing_parameters(
    params: TransmonParams,
    mode: Literal["asymptotic", "exact"] = "asymptotic",
    include_first_level: bool = False,
) -> DuffingParams:
    """Parity-split Duffing parameters of a transmon.

    omega = sqrt(8 E_J E_C) - E_C, alpha = -E_C and
    delta_alpha = P eps_2 cos(2 pi n_g) / 2, converted to rad/s.
    ``delta_omega`` is zero unless ``include_first_level`` is set, in which
    case it is P eps_1 cos(2 pi n_g) / 2.
    """
    r = _check_ratio(params.e_j, params.e_c)
    notes = ()
    if r < 20:
        notes = (f"E_J/E_C = {r:.3g} below 20; Duffing approximation questionable",)
    omega = (math.sqrt(8 * params.e_j * params.e_c) - params.e_c) * GHZ
    alpha = -params.e_c * GHZ
    if mode == "asymptotic":
        eps = lambda m: charge_dispersion_asymptotic(params.e_j, params.e_c, m)  # noqa: E731
    elif mode == "exact":
        eps = lambda m: charge_dispersion_exact(params.e_j, params.e_c, m)  # noqa: E731
    else:
        raise ConfigurationError(f"unknown mode {mode!r}")
    c = math.cos(2 * math.pi * params.n_g)
    d_alpha = params.parity * eps(2) * c / 2.0 * GHZ
    d_omega = params.parity * eps(1) * c / 2.0 * GHZ if include_first_level else 0.0
    return DuffingParams(omega, alpha, d_omega, d_alpha, notes)
