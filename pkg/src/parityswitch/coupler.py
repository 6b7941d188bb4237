"""Three-transmon tunable-coupler system: Hamiltonian, dressed basis, ZZ.

Mode ordering is (q1, c, q2); a Fock state |i, j, k> has flat index
(i * L + j) * L + k for L levels per transmon. Angular frequencies are rad/s.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from .errors import (
    AmbiguousBasisError,
    ConfigurationError,
    IdlingConfigurationError,
    InvalidParameterError,
    NoIdlingPointError,
)
from .spectral import TransmonParams, charge_dispersion_asymptotic, charge_dispersion_exact
from .units import GHZ, MHZ, TWO_PI

MODES = ("q1", "c", "q2")
PAIRS = ("q1c", "q2c", "q1q2")
_PAIR_INDEX = {"q1c": (0, 1), "q2c": (2, 1), "q1q2": (0, 2)}
LABELS = ("00", "01", "10", "11", "02")
_FOCK = {"00": (0, 0, 0), "01": (0, 0, 1), "10": (1, 0, 0), "11": (1, 0, 1), "02": (0, 0, 2)}
MAX_LEVELS = 12
ParityState = Tuple[int, int, int]
PARITY_STATES: Tuple[ParityState, ...] = tuple(itertools.product((1, -1), repeat=3))


def _normalize_beta(beta) -> Dict[str, float]:
    out = {}
    for key, val in dict(beta).items():
        k = key.replace("_", "").replace("-", "").lower()
        if k in ("cq1",):
            k = "q1c"
        elif k in ("cq2",):
            k = "q2c"
        elif k in ("q2q1",):
            k = "q1q2"
        if k not in PAIRS:
            raise InvalidParameterError(f"unknown coupling pair {key!r}")
        out[k] = float(val)
    for k in PAIRS:
        out.setdefault(k, 0.0)
        if not (0.0 <= out[k] < 1.0):
            raise InvalidParameterError(f"beta_{k} = {out[k]} outside [0, 1)")
    return out


@dataclass(frozen=True)
class CircuitParams:
    """Two qubits and a tunable coupler with capacitive couplings.

    Attributes
    ----------
    q1, c, q2 : TransmonParams
        ``c.e_j`` is the coupler's Josephson energy at its maximum frequency;
        the operating coupler frequency is passed separately to each routine.
    beta : mapping
        Dimensionless prefactors for pairs q1c, q2c, q1q2, g_ij = beta_ij sqrt(w_i w_j).
    levels : int
        Levels kept per transmon.
    """

    q1: TransmonParams
    c: TransmonParams
    q2: TransmonParams
    beta: Mapping[str, float] = field(
        default_factory=lambda: {"q1c": 0.015, "q2c": 0.015, "q1q2": 0.001}
    )
    levels: int = 5

    def __post_init__(self):
        object.__setattr__(self, "beta", _normalize_beta(self.beta))
        if self.levels < 3:
            raise ConfigurationError("at least 3 levels per transmon are required")
        if self.levels > MAX_LEVELS:
            raise ConfigurationError(f"levels > {MAX_LEVELS} would overflow the dense solver")

    # bare parity-averaged Duffing parameters
    @staticmethod
    def _omega(p: TransmonParams) -> float:
        return (math.sqrt(8 * p.e_j * p.e_c) - p.e_c) * GHZ

    @property
    def omega_q1(self) -> float:
        return self._omega(self.q1)

    @property
    def omega_q2(self) -> float:
        return self._omega(self.q2)

    @property
    def omega_c_max(self) -> float:
        return self._omega(self.c)

    @property
    def alphas(self) -> np.ndarray:
        return -np.array([self.q1.e_c, self.c.e_c, self.q2.e_c]) * GHZ

    @property
    def detuning(self) -> float:
        """Bare qubit-qubit detuning w_q1 - w_q2."""
        return self.omega_q1 - self.omega_q2

    def coupler_at(self, omega_c: float) -> TransmonParams:
        """Coupler transmon with E_J tuned so that its frequency is ``omega_c``."""
        return TransmonParams.from_frequency(omega_c, -self.c.e_c * GHZ, self.c.n_g, self.c.parity)

    def replace(self, **changes) -> "CircuitParams":
        d = dict(q1=self.q1, c=self.c, q2=self.q2, beta=dict(self.beta), levels=self.levels)
        d.update(changes)
        return CircuitParams(**d)

    def couplings(self, omega_c: float) -> Dict[str, float]:
        w = {"q1": self.omega_q1, "c": omega_c, "q2": self.omega_q2}
        out = {}
        for k, (i, j) in _PAIR_INDEX.items():
            out[k] = self.beta[k] * math.sqrt(w[MODES[i]] * w[MODES[j]])
        return out


def table1_circuit(
    alpha_q2: float = -0.270 * GHZ,
    omega_q2: float = 4.8 * GHZ,
    alpha_c: float = -0.110 * GHZ,
    omega_c_max: float = 8.0 * GHZ,
    beta: Optional[Mapping[str, float]] = None,
    levels: int = 5,
) -> CircuitParams:
    """Reference circuit: q1 one anharmonicity (+10 MHz) below q2.

    alpha_q1 = alpha_q2 + 10 MHz, w_q1 = w_q2 + alpha_q2 + 10 MHz,
    beta_q1c = beta_q2c = 0.015, beta_q1q2 = 0.001.
    """
    q2 = TransmonParams.from_frequency(omega_q2, alpha_q2)
    q1 = TransmonParams.from_frequency(omega_q2 + alpha_q2 + 10 * MHZ, alpha_q2 + 10 * MHZ)
    c = TransmonParams.from_frequency(omega_c_max, alpha_c)
    if beta is None:
        beta = {"q1c": 0.015, "q2c": 0.015, "q1q2": 0.001}
    return CircuitParams(q1=q1, c=c, q2=q2, beta=beta, levels=levels)


def ratio_to_alpha(ratio: float, omega: float = 4.8 * GHZ) -> float:
    """Anharmonicity -E_C (rad/s) of a transmon with E_J/E_C = ratio at frequency omega."""
    e_c = (omega / GHZ) / (math.sqrt(8.0 * ratio) - 1.0)
    return -e_c * GHZ


def table1_circuit_from_ratio(ratio: float, **kwargs) -> CircuitParams:
    """Reference circuit with q2's E_J/E_C fixed at ``ratio`` (w_q2 kept)."""
    omega_q2 = kwargs.pop("omega_q2", 4.8 * GHZ)
    return table1_circuit(alpha_q2=ratio_to_alpha(ratio, omega_q2), omega_q2=omega_q2, **kwargs)


# --------------------------------------------------------------------------
# parity shifts

def transmon_dispersions(p: TransmonParams, mode: str = "asymptotic") -> Tuple[float, float]:
    """(eps_1, eps_2) in h*GHz."""
    f = charge_dispersion_asymptotic if mode == "asymptotic" else charge_dispersion_exact
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return f(p.e_j, p.e_c, 1), f(p.e_j, p.e_c, 2)


def circuit_dispersions(circuit: CircuitParams, omega_c: float, mode: str = "asymptotic"):
    """Per-mode (eps_1, eps_2) in h*GHz, coupler evaluated at ``omega_c``."""
    return {
        "q1": transmon_dispersions(circuit.q1, mode),
        "c": transmon_dispersions(circuit.coupler_at(omega_c), mode),
        "q2": transmon_dispersions(circuit.q2, mode),
    }


def mode_parameters(
    circuit: CircuitParams,
    omega_c: float,
    parity_state: Optional[ParityState] = None,
    dispersions=None,
    include_first_level: bool = False,
) -> Tuple[np.ndarray, np.ndarray]:
    """Frequencies and anharmonicities (rad/s) in (q1, c, q2) order.

    Without ``parity_state`` the parity-averaged values are returned. With it,
    alpha_i gains P_i eps2_i cos(2 pi n_g,i)/2 and, if ``include_first_level``,
    omega_i gains P_i eps1_i cos(2 pi n_g,i)/2.
    """
    w = np.array([circuit.omega_q1, omega_c, circuit.omega_q2], dtype=float)
    a = circuit.alphas.copy()
    if parity_state is None:
        return w, a
    if dispersions is None:
        dispersions = circuit_dispersions(circuit, omega_c)
    ngs = (circuit.q1.n_g, circuit.c.n_g, circuit.q2.n_g)
    for i, name in enumerate(MODES):
        e1, e2 = dispersions[name]
        cg = math.cos(TWO_PI * ngs[i])
        a[i] += parity_state[i] * e2 * cg / 2.0 * GHZ
        if include_first_level:
            w[i] += parity_state[i] * e1 * cg / 2.0 * GHZ
    return w, a


# --------------------------------------------------------------------------
# Hamiltonian

@lru_cache(maxsize=8)
def mode_operators(levels: int):
    """Number operators, (a^dag - a) operators and a^dag a^dag a a, per mode."""
    a = np.diag(np.sqrt(np.arange(1, levels, dtype=float)), 1)
    eye = np.eye(levels)
    mats = []
    for k in range(3):
        ops = [eye, eye, eye]
        ops[k] = a
        mats.append(np.kron(np.kron(ops[0], ops[1]), ops[2]))
    n_ops = [m.T @ m for m in mats]
    x_ops = [m.T - m for m in mats]
    kerr = [np.diag(np.diag(n) * (np.diag(n) - 1.0)) for n in n_ops]
    for arr in n_ops + x_ops + kerr:
        arr.setflags(write=False)
    return tuple(n_ops), tuple(x_ops), tuple(kerr)


def fock_index(i: int, j: int, k: int, levels: int) -> int:
    return (i * levels + j) * levels + k


@dataclass(frozen=True)
class LabeledHamiltonian:
    """Dense Hamiltonian (rad/s) on the (q1, c, q2) Fock basis."""

    matrix: np.ndarray
    levels: int
    omega_c: float
    modes: Tuple[str, str, str] = MODES

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def hamiltonian_matrix(w: Sequence[float], a: Sequence[float], g: Mapping[str, float], levels: int):
    """Assemble sum_i w_i n_i + a_i/2 n_i(n_i-1) - sum_pairs g_ij X_i X_j."""
    n_ops, x_ops, kerr = mode_operators(levels)
    h = np.zeros_like(n_ops[0])
    for i in range(3):
        h = h + w[i] * n_ops[i] + 0.5 * a[i] * kerr[i]
    for key, (i, j) in _PAIR_INDEX.items():
        if g[key] != 0.0:
            # X_i X_j = (a_i^dag - a_i)(a_j^dag - a_j) is real symmetric
            h = h - g[key] * (x_ops[i] @ x_ops[j])
    return h


def build_hamiltonian(
    circuit: CircuitParams,
    omega_c: float,
    parity_state: Optional[ParityState] = None,
    dispersions=None,
    include_first_level: bool = False,
    _modes: Optional[Tuple[np.ndarray, np.ndarray]] = None,
) -> LabeledHamiltonian:
    """Lab-frame three-transmon Hamiltonian at coupler frequency ``omega_c``.

    Couplings keep the full (a^dag - a)(a^dag - a) form; g_ic is recomputed
    as beta_ic sqrt(w_i w_c) at the given coupler frequency.
    """
    if not omega_c > 0:
        raise InvalidParameterError("coupler frequency must be positive")
    if _modes is None:
        w, a = mode_parameters(circuit, omega_c, parity_state, dispersions, include_first_level)
    else:
        w, a = _modes
    g = {k: circuit.beta[k] * math.sqrt(w[i] * w[j]) for k, (i, j) in _PAIR_INDEX.items()}
    h = hamiltonian_matrix(w, a, g, circuit.levels)
    if np.max(np.abs(h - h.conj().T)) > 1e-12 * max(1.0, np.max(np.abs(h))):
        raise ArithmeticError("Hamiltonian is not Hermitian")
    return LabeledHamiltonian(h, circuit.levels, omega_c)


# --------------------------------------------------------------------------
# dressed computational basis

@dataclass(frozen=True)
class ComputationalBasis:
    """Dressed states identified by maximal overlap with |i 0 j>.

    ``overlaps`` holds |<psi|i 0 j>|; identification requires the squared
    overlap (population) to exceed 1/2.
    """

    indices: Dict[str, int]
    overlaps: Dict[str, float]
    energies: Dict[str, float]
    vectors: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def vector(self, label: str) -> np.ndarray:
        return self.vectors[:, self.indices[label]]


def identify_computational_states(
    h, labels: Sequence[str] = LABELS, threshold: float = 0.5
) -> ComputationalBasis:
    """Label the eigenstates of ``h`` closest to |00>, |01>, |10>, |11>, |02>.

    Eigenvectors are phase-fixed so that the labelled Fock component is real
    and positive.
    """
    mat = h.matrix if isinstance(h, LabeledHamiltonian) else np.asarray(h)
    levels = h.levels if isinstance(h, LabeledHamiltonian) else round(mat.shape[0] ** (1 / 3))
    evals, evecs = np.linalg.eigh(mat)
    indices, overlaps, energies = {}, {}, {}
    for lab in labels:
        row = fock_index(*_FOCK[lab], levels)
        amps = np.abs(evecs[row, :])
        k = int(np.argmax(amps))
        if amps[k] ** 2 <= threshold:
            raise AmbiguousBasisError(
                f"state |{lab}> has maximal population {amps[k] ** 2:.3f} <= {threshold}"
            )
        if k in indices.values():
            raise AmbiguousBasisError(f"state |{lab}> maps to an already used eigenstate")
        indices[lab] = k
        overlaps[lab] = float(amps[k])
        energies[lab] = float(evals[k])
        ph = evecs[row, k]
        evecs[:, k] *= np.conj(ph) / abs(ph)
    return ComputationalBasis(indices, overlaps, energies, evecs)


def _zeta_from_energies(e: Mapping[str, float]) -> float:
    return e["11"] - e["01"] - e["10"] + e["00"]


def zz_from_modes(w, a, circuit: CircuitParams) -> float:
    """ZZ rate for explicit mode parameters (rad/s).

    Exactly zero when either qubit has no coupling at all: the Hamiltonian is
    then a tensor sum and the diagonalization would only add rounding noise.
    """
    b = circuit.beta
    if b["q1q2"] == 0.0 and (b["q1c"] == 0.0 or b["q2c"] == 0.0):
        return 0.0
    g ={k: circuit.beta[k] * math.sqrt(w[i] * w[j]) for k, (i, j) in _PAIR_INDEX.items()}
    h = hamiltonian_matrix(w, a, g, circuit.levels)
    basis = identify_computational_states(
        LabeledHamiltonian(h, circuit.levels, w[1]), labels=("00", "01", "10", "11")
    )
    return _zeta_from_energies(basis.energies)


def zz_rate(circuit: CircuitParams, omega_c: float, parity_state=None, dispersions=None,
            include_first_level: bool = False) -> float:
    """Static ZZ rate w_11 - w_01 - w_10 + w_00 (rad/s) from exact diagonalization."""
    w, a = mode_parameters(circuit, omega_c, parity_state, dispersions, include_first_level)
    return zz_from_modes(w, a, circuit)


def zz_perturbative(circuit: CircuitParams, omega_c: float) -> float:
    """Closed-form ZZ rate valid for Sigma >> Delta >> g_ic >> g_12.

    Uses nu = g_q1c g_q2c / (2 Delta_q1c Delta_q2c) and the dressed exchange
    coupling g~_01,10. A warning is emitted when the hierarchy is violated.
    """
    from .swt import swt_parameters  # local import avoids a cycle

    g = circuit.couplings(omega_c)
    w1, w2 = circuit.omega_q1, circuit.omega_q2
    a1, ac, a2 = circuit.alphas
    d1c, d2c = w1 - omega_c, w2 - omega_c
    s1c, s2c = w1 + omega_c, w2 + omega_c
    _warn_hierarchy(g, (d1c, d2c), (s1c, s2c))
    nu = g["q1c"] * g["q2c"] / (2.0 * d1c * d2c)
    eff = swt_parameters(circuit, omega_c, check=False)
    gt = eff.g_0110_t
    d12 = w1 - w2
    den = (d12 + a1) * (d12 - a2)
    term1 = 2.0 * ((a1 + a2) * gt**2 - 2.0 * nu * gt * (2 * a1 * a2 + (a1 - a2) * d12)) / den
    term2 = 2.0 * nu**2 * (4 * ac + (a1 + a2) * d12**2 / den)
    return term1 + term2


def _warn_hierarchy(g, deltas, sigmas, margin_sd=5.0, margin_dg=5.0, margin_g=10.0):
    msgs = []
    for gi, d, s, name in zip((g["q1c"], g["q2c"]), deltas, sigmas, ("q1", "q2")):
        if abs(s) < margin_sd * abs(d):
            msgs.append(f"Sigma/Delta < {margin_sd} for {name}")
        if abs(d) < margin_dg * gi:
            msgs.append(f"Delta/g < {margin_dg} for {name}")
        if g["q1q2"] > 0 and gi < margin_g * g["q1q2"]:
            msgs.append(f"g_{name}c/g_12 < {margin_g}")
    for m in msgs:
        warnings.warn("parameter hierarchy violated: " + m, stacklevel=3)
    return msgs


def _safe_zz(circuit, omega_c):
    try:
        return zz_rate(circuit, omega_c)
    except AmbiguousBasisError:
        return np.nan


def idling_window(circuit: CircuitParams) -> Tuple[float, float]:
    top = max(circuit.omega_q1, circuit.omega_q2)
    return top + 100 * MHZ, top + 2500 * MHZ


def find_idling_frequency(
    circuit: CircuitParams,
    window: Optional[Tuple[float, float]] = None,
    scan_step: float = 5 * MHZ,
    tolerance: float = TWO_PI * 1.0,
) -> list:
    """Coupler frequencies (rad/s) where the static ZZ rate vanishes.

    A dense scan over ``window`` brackets sign changes, each refined with
    Brent's method. Brackets around poles (avoided crossings where the ZZ
    rate diverges and flips sign) are rejected because the refined rate does
    not fall below ``tolerance``.
    """
    d = circuit.detuning
    a1, _, a2 = circuit.alphas
    if not (a2 <= d <= -a1):
        raise NoIdlingPointError(
            f"qubit detuning {d / MHZ:.1f} MHz outside [alpha_q2, -alpha_q1]"
        )
    lo, hi = window if window is not None else idling_window(circuit)
    grid = np.arange(lo, hi + 0.5 * scan_step, scan_step)
    vals = np.array([_safe_zz(circuit, wc) for wc in grid])
    roots = []
    for k in range(len(grid) - 1):
        v0, v1 = vals[k], vals[k + 1]
        if not (np.isfinite(v0) and np.isfinite(v1)) or np.sign(v0) == np.sign(v1):
            continue
        try:
            root = brentq(lambda x: zz_rate(circuit, x), grid[k], grid[k + 1],
                          xtol=1e-6, rtol=4 * np.finfo(float).eps, maxiter=200)
        except (AmbiguousBasisError, ValueError):
            continue
        if abs(zz_rate(circuit, root)) < tolerance:
            roots.append(float(root))
    if not roots:
        raise NoIdlingPointError("no zero of the ZZ rate in the search window")
    return roots


# --------------------------------------------------------------------------
# parity-dependent ZZ

@dataclass(frozen=True)
class ZZReport:
    """Parity-resolved static ZZ at one coupler frequency (all rad/s)."""

    zeta_zz: float
    per_parity: Dict[ParityState, float]
    rms: float
    d_alpha: Dict[str, float]
    d_omega: Dict[str, float]
    dispersions: Dict[str, Tuple[float, float]]
    per_parity_exact: Optional[Dict[ParityState, float]] = None
    rms_exact: Optional[float] = None
    step: float = 1 * MHZ
    notes: Tuple[str, ...] = ()


MIN_FD_STEP = 2 * np.pi * 1e3


def zz_derivatives(circuit: CircuitParams, omega_c: float, step: float = 1 * MHZ):
    """Central-difference derivatives of the ZZ rate w.r.t. each w_i and alpha_i."""
    w0, a0 = mode_parameters(circuit, omega_c)
    d_alpha, d_omega = {}, {}
    for i, name in enumerate(MODES):
        for arr0, other, out, is_w in ((a0, w0, d_alpha, False), (w0, a0, d_omega, True)):
            p, m = arr0.copy(), arr0.copy()
            p[i] += step
            m[i] -= step
            if is_w:
                zp, zm = zz_from_modes(p, other, circuit), zz_from_modes(m, other, circuit)
            else:
                zp, zm = zz_from_modes(other, p, circuit), zz_from_modes(other, m, circuit)
            out[name] = (zp - zm) / (2 * step)
    return d_alpha, d_omega


def parity_zz_spread(
    circuit: CircuitParams,
    omega_c: float,
    dispersions: Optional[Mapping[str, Tuple[float, float]]] = None,
    step: float = 1 * MHZ,
    exact: bool = True,
) -> ZZReport:
    """First-order parity spread of the idling ZZ rate and its RMS over 8 parities.

    Parameters
    ----------
    dispersions : mapping, optional
        Per mode (eps_1, eps_2) in h*GHz. Defaults to the asymptotic values.
    exact : bool
        Also rediagonalize with shifted parameters for every parity state.
    """
    notes = []
    if step < MIN_FD_STEP:
        warnings.warn("finite-difference step below solver resolution, raised to 2pi*1 kHz")
        notes.append("step raised to 2pi*1 kHz")
        step = MIN_FD_STEP
    if dispersions is None:
        dispersions = circuit_dispersions(circuit, omega_c)
    dispersions = {k: (float(v[0]), float(v[1])) for k, v in dispersions.items()}
    z0 = zz_rate(circuit, omega_c)
    d_alpha, d_omega = zz_derivatives(circuit, omega_c, step)
    ngs = {"q1": circuit.q1.n_g, "c": circuit.c.n_g, "q2": circuit.q2.n_g}
    per = {}
    for ps in PARITY_STATES:
        val = z0
        for i, name in enumerate(MODES):
            e1, e2 = dispersions[name]
            cg = math.cos(TWO_PI * ngs[name])
            val += ps[i] / 2.0 * (d_alpha[name] * e2 + d_omega[name] * e1) * cg * GHZ
        per[ps] = val
    rms = math.sqrt(np.mean([v**2 for v in per.values()]))
    per_ex, rms_ex = None, None
    if exact:
        per_ex = {
            ps: zz_rate(circuit, omega_c, ps, dispersions, include_first_level=True)
            for ps in PARITY_STATES
        }
        rms_ex = math.sqrt(np.mean([v**2 for v in per_ex.values()]))
    return ZZReport(z0, per, rms, d_alpha, d_omega, dispersions, per_ex, rms_ex, step, tuple(notes))


@dataclass(frozen=True)
class AdiabaticSensitivity:
    sensitivity: float  # seconds
    fidelity: float
    zeta0: float
    dzeta_dalpha_q2: float


def adiabatic_parity_sensitivity(
    circuit: CircuitParams,
    omega_c: float,
    phi0: float = math.pi,
    eps2_q2: Optional[float] = None,
    step: float = 1 * MHZ,
) -> AdiabaticSensitivity:
    """Parity susceptibility of an adiabatic CPHASE held at ``omega_c``.

    sensitivity = (d zeta / d alpha_q2) phi0 / |zeta0|, and
    F = 1 - 3/80 [sensitivity eps2 cos(2 pi n_g)/hbar]^2. ``eps2_q2`` in h*GHz.
    """
    z0 = zz_rate(circuit, omega_c)
    if abs(z0) < TWO_PI * 1.0:
        raise IdlingConfigurationError("static ZZ vanishes: coupler is at an idling point")
    w, a = mode_parameters(circuit, omega_c)
    ap, am = a.copy(), a.copy()
    ap[2] += step
    am[2] -= step
    dz = (zz_from_modes(w, ap, circuit) - zz_from_modes(w, am, circuit)) / (2 * step)
    s = dz * phi0 / abs(z0)
    if eps2_q2 is None:
        eps2_q2 = transmon_dispersions(circuit.q2)[1]
    x = s * eps2_q2 * GHZ * math.cos(TWO_PI * circuit.q2.n_g)
    return AdiabaticSensitivity(s, 1.0 - 3.0 / 80.0 * x**2, z0, dz)
