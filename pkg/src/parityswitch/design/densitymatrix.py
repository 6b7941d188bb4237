"""Two-qubit density-matrix simulation of the reference circuit.

Sequence: thermal product state, then N repetitions of (a pi and a pi/2
rotation about a random axis in {+-x, +-y} on each qubit, followed by a CZ).
Ideal gates are followed by noise channels; the axes are drawn once from a
seeded generator so every grid cell runs the same circuit. Cells are batched
along the leading axis of the (n, 4, 4) density-matrix stack.

Leakage during the pi rotations is treated as loss (trace-decreasing), with
population fraction P_leak/3 removed per gate, i.e. the per-gate infidelity
the metric assigns to it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from ..errors import InvalidParameterError
from .metric import error_inputs
from .noise import CircuitSpec, NoiseModel

CHANNELS = ("t1", "tphi", "leak", "parity", "thermal")

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_CZ = np.diag([1, 1, 1, -1]).astype(complex)
_BITS = np.array([[0, 0], [0, 1], [1, 0], [1, 1]])  # (q1, q2) of basis index
# off-diagonal masks: entries whose bra and ket differ on the given qubit
_DIFF = [(_BITS[:, None, q] != _BITS[None, :, q]).astype(float) for q in (0, 1)]
_ONE11 = ((np.arange(4)[:, None] == 3) ^ (np.arange(4)[None, :] == 3)).astype(float)


def rotation(axis: int, angle: float) -> np.ndarray:
    """Single-qubit rotation about +x (0), +y (1), -x (2) or -y (3)."""
    p = (_X, _Y, -_X, -_Y)[axis]
    return np.cos(angle / 2) * _I2 - 1j * np.sin(angle / 2) * p


def _on(q: int, u: np.ndarray) -> np.ndarray:
    return np.kron(u, _I2) if q == 0 else np.kron(_I2, u)


def _unitary(rho, u):
    return u @ rho @ u.conj().T


def _amplitude_damping(rho, q, gamma):
    """Batched amplitude damping with per-cell probability ``gamma``."""
    k0 = np.zeros((len(gamma), 2, 2), dtype=complex)
    k0[:, 0, 0] = 1.0
    k0[:, 1, 1] = np.sqrt(1.0 - gamma)
    k1 = np.zeros_like(k0)
    k1[:, 0, 1] = np.sqrt(gamma)
    out = 0
    for k in (k0, k1):
        big = np.einsum("nab,cd->nacbd", k, _I2) if q == 0 else np.einsum("ab,ncd->nacbd", _I2, k)
        big = big.reshape(len(gamma), 4, 4)
        out = out + big @ rho @ big.conj().transpose(0, 2, 1)
    return out


def _dephasing(rho, q, lam):
    """Multiply coherences between states differing on qubit q by ``lam``."""
    m = _DIFF[q][None]
    return rho * (1.0 + m * (lam[:, None, None] - 1.0))


@dataclass
class ReferenceCircuitResult:
    infidelity: np.ndarray
    n_repetitions: int
    enabled: tuple


def simulate_reference_circuit(e_j, e_c, model: NoiseModel, spec: CircuitSpec = CircuitSpec(),
                               enabled: Optional[tuple] = None, seed: int = 1234,
                               n_repetitions: Optional[int] = None) -> ReferenceCircuitResult:
    """Final-state infidelity 1 - <psi|rho|psi> of the noisy reference circuit.

    Parameters
    ----------
    e_j, e_c : array_like
        Energies of the high-frequency qubit (h*GHz); broadcast against each other.
    enabled : tuple of str, optional
        Subset of ``CHANNELS`` to switch on (all by default); used to isolate terms.
    seed : int
        Seed for the rotation axes.
    n_repetitions : int, optional
        Defaults to floor(T1_ref / (10 (t_TQG + 2 t_SQG))).
    """
    if model.model_kind != "basic":
        raise InvalidParameterError("the density-matrix oracle implements the basic model only")
    enabled = CHANNELS if enabled is None else tuple(enabled)
    unknown = set(enabled) - set(CHANNELS)
    if unknown:
        raise InvalidParameterError(f"unknown channels {sorted(unknown)}")
    e_j, e_c = np.broadcast_arrays(np.asarray(e_j, dtype=float), np.asarray(e_c, dtype=float))
    shape = e_j.shape
    x = error_inputs(e_j.ravel(), e_c.ravel(), model, spec)
    n = e_j.size
    n_rep = spec.n_repetitions(model.t1_ref) if n_repetitions is None else int(n_repetitions)

    def vec(v):
        return np.broadcast_to(np.asarray(v, dtype=float), (n,)).copy()

    zero = np.zeros(n)
    g1 = [vec(g) if "t1" in enabled else zero for g in x.gamma1]
    gp = [vec(g) if "tphi" in enabled else zero for g in x.gamma_phi]
    leak = [vec(p) if "leak" in enabled else zero for p in x.leak]
    pexc = [vec(p) if "thermal" in enabled else zero for p in x.p_excited]
    dphi = vec(x.delta_phi) if "parity" in enabled else zero

    # per-gate channel parameters
    ad_s = [1.0 - np.exp(-g * spec.t_sqg) for g in g1]
    ad_t = [1.0 - np.exp(-g * spec.t_tqg) for g in g1]
    lam_s = [np.exp(-g * spec.t_sqg / 2) for g in gp]
    lam_t = [np.exp(-g * spec.t_tqg / 2) for g in gp]
    keep = [1.0 - p / 3.0 for p in leak]
    parity_mask = 1.0 + _ONE11[None] * (np.cos(dphi / 2)[:, None, None] - 1.0)

    rho = np.zeros((n, 4, 4), dtype=complex)
    for idx, (a, b) in enumerate(_BITS):
        rho[:, idx, idx] = (pexc[0] if a else 1 - pexc[0]) * (pexc[1] if b else 1 - pexc[1])
    psi = np.zeros(4, dtype=complex)
    psi[0] = 1.0

    rng = np.random.default_rng(seed)
    axes = rng.integers(0, 4, size=(n_rep, 2, 2))
    for r in range(n_rep):
        for q in (0, 1):
            for g, angle in enumerate((np.pi, np.pi / 2)):
                u = _on(q, rotation(int(axes[r, q, g]), angle))
                rho = _unitary(rho, u)
                psi = u @ psi
                rho = _amplitude_damping(rho, q, ad_s[q])
                rho = _dephasing(rho, q, lam_s[q])
                if g == 0:
                    rho = rho * keep[q][:, None, None]
        rho = _unitary(rho, _CZ)
        psi = _CZ @ psi
        for q in (0, 1):
            rho = _amplitude_damping(rho, q, ad_t[q])
            rho = _dephasing(rho, q, lam_t[q])
        rho = rho * parity_mask
    fid = np.real(np.einsum("i,nij,j->n", psi.conj(), rho, psi))
    return ReferenceCircuitResult((1.0 - fid).reshape(shape), n_rep, enabled)


def isolate_terms(e_j, e_c, model: NoiseModel, spec: CircuitSpec = CircuitSpec(),
                  seed: int = 1234) -> Dict[str, np.ndarray]:
    """Oracle infidelity per repetition with one channel enabled at a time."""
    out = {}
    for ch in CHANNELS:
        res = simulate_reference_circuit(e_j, e_c, model, spec, enabled=(ch,), seed=seed)
        out[ch] = res.infidelity / res.n_repetitions
    return out
