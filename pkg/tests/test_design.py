import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from parityswitch.design.densitymatrix import (
    CHANNELS,
    isolate_terms,
    rotation,
    simulate_reference_circuit,
)
from parityswitch.design.loop import optimize_loop, reanchor
from parityswitch.design.metric import (
    BASIC_COEFFICIENTS,
    INFEASIBLE,
    LABELS,
    MetricResult,
    default_grid,
    eps2_asymptotic,
    error_inputs,
    landscape_scan,
    parity_term,
    partner_qubit,
    percentile_mask,
    performance_metric,
)
from parityswitch.design.noise import CircuitSpec, NoiseModel
from parityswitch.errors import InvalidParameterError, TuningRangeError
from parityswitch.spectral import charge_dispersion_asymptotic
from parityswitch.units import GHZ

T_REF = 0.5e-3


@pytest.fixture(scope="module")
def model():
    return NoiseModel(T_REF, T_REF)


@pytest.fixture(scope="module")
def land(model):
    return landscape_scan(*default_grid(), model)


# --------------------------------------------------------------------------
# metric terms

def test_eps2_matches_spectral():
    for ej, ec in ((13.5, 0.27), (20.0, 0.3)):
        assert eps2_asymptotic(ej, ec) == pytest.approx(
            abs(charge_dispersion_asymptotic(ej, ec, 2)), rel=1e-12)


def test_parity_term_zero_and_form():
    assert parity_term(12.0, 0.2, 50e-9, eps2=0.0) == 0.0
    x = 50e-9 * 1e-3 * GHZ / 2
    assert parity_term(12.0, 0.2, 50e-9, eps2=1e-3) == pytest.approx(3 / 80 * x**2, rel=1e-14)


def test_parity_term_steep_decrease():
    ec = 0.25
    r = np.linspace(20, 100, 41)
    v = parity_term(r * ec, ec, 50e-9)
    assert np.all(np.diff(v) < 0)
    # doubling E_J/E_C at fixed E_C: exponential factor times the r^(7/2) prefactor
    for r0 in (25.0, 40.0):
        ratio = parity_term(2 * r0 * ec, ec, 50e-9) / parity_term(r0 * ec, ec, 50e-9)
        ref = math.exp(-2 * math.sqrt(8) * (math.sqrt(2 * r0) - math.sqrt(r0))) * 2**3.5
        assert ratio == pytest.approx(ref, rel=1e-12)
        assert ratio < 1e-3


def test_zero_noise_metric_is_zero():
    m = NoiseModel(1e30, 1e30, temperature=1e-6, leakage_ref=0.0)
    res = performance_metric(400.0, 0.3, m)
    assert res.one_minus_p < 1e-20
    assert set(res.terms) == {"parity", "t1_tqg", "tphi_tqg", "sqg_t1", "sqg_tphi", "leak", "thermal"}


def test_coefficient_audit(model):
    """Coefficients recovered exactly as fractions from the evaluated terms."""
    spec = CircuitSpec()
    ej, ec = 12.0, 0.2
    x = error_inputs(ej, ec, model, spec)
    t = performance_metric(ej, ec, model, spec).terms
    g1, gp = sum(x.gamma1), sum(x.gamma_phi)
    w = spec.weights
    got = {
        "t1_tqg": t["t1_tqg"] / (g1 * spec.t_tqg),
        "tphi_tqg": t["tphi_tqg"] / (gp * spec.t_tqg),
        "parity": t["parity"] / x.delta_phi**2,
        "sqg_t1": t["sqg_t1"] / (w["sqg_decoherence"] * g1 * spec.t_sqg),
        "sqg_tphi": t["sqg_tphi"] / (w["sqg_decoherence"] * gp * spec.t_sqg),
        "leak": t["leak"] / sum(x.leak),
    }
    for k, v in got.items():
        assert Fraction(float(v)).limit_denominator(1000) == BASIC_COEFFICIENTS[k]
    assert BASIC_COEFFICIENTS == {"t1_tqg": Fraction(2, 5), "tphi_tqg": Fraction(1, 5),
                                  "parity": Fraction(3, 80), "sqg_t1": Fraction(1, 3),
                                  "sqg_tphi": Fraction(1, 6), "leak": Fraction(1, 3)}
    wsp = Fraction(t["thermal"] / sum(x.p_excited)).limit_denominator(10**6)
    assert wsp == Fraction(10) * Fraction(82, 10**9) / Fraction(T_REF).limit_denominator(10**6)


def test_partner_qubit_basic():
    ej1, ec1 = partner_qubit(12.0, 0.2)
    w2 = math.sqrt(8 * 12.0 * 0.2) - 0.2
    w1 = math.sqrt(8 * ej1 * ec1) - ec1
    assert ec1 == pytest.approx(0.19)
    assert w1 - w2 == pytest.approx(-0.2 + 0.01, abs=1e-12)


def test_terms_monotone(model):
    ec = np.linspace(0.12, 0.45, 25)
    leak = performance_metric(12.0, ec, model).terms["leak"]
    assert np.all(np.diff(leak) < 0)
    ej = np.linspace(6.0, 30.0, 25)
    r = performance_metric(ej, 0.25, model).terms
    assert np.all(np.diff(r["t1_tqg"]) > 0)
    assert np.all(np.diff(r["thermal"]) < 0)
    assert np.all(np.diff(r["parity"]) < 0)


def test_dominant_tie_break():
    z = np.zeros(1)
    terms = {k: z.copy() for k in ("parity", "t1_tqg", "tphi_tqg", "sqg_t1", "sqg_tphi", "leak")}
    terms["thermal"] = z.copy()
    terms["leak"] = np.ones(1)
    terms["parity"] = np.ones(1)
    res = MetricResult(np.full(1, 2.0), terms, "basic")
    assert res.dominant()[0] == "leakage"  # leakage precedes parity in the fixed order
    assert LABELS.index("leakage") < LABELS.index("parity")


def test_advanced_point_outside_tuning_range():
    m = NoiseModel(T_REF, T_REF, model_kind="advanced")
    with pytest.raises(TuningRangeError):
        performance_metric(4.0, 0.5, m)
    res = performance_metric(4.0, 0.5, m, strict=False)
    assert np.isnan(res.one_minus_p)
    assert res.dominant() == INFEASIBLE


def test_advanced_discrepancy_larger_at_low_coherence():
    stats = {}
    for t in (0.125e-3, 0.5e-3):
        b = landscape_scan(*default_grid(30), NoiseModel(t, t))
        a = landscape_scan(*default_grid(30), NoiseModel(t, t, model_kind="advanced"))
        stats[t] = np.nanmedian(a.one_minus_p / b.one_minus_p) - 1
    assert stats[0.125e-3] > stats[0.5e-3] > 0


# --------------------------------------------------------------------------
# landscape

def test_uniform_mask_fraction():
    m = percentile_mask(np.ones((10, 10)), 0.25)
    assert m.sum() == 25
    assert m.ravel()[:25].all() and not m.ravel()[25:].any()


@given(st.integers(3, 40), st.integers(3, 40), st.floats(0.01, 0.99))
def test_mask_fraction_property(n, k, q):
    vals = np.random.default_rng(n * 100 + k).random((n, k))
    m = percentile_mask(vals, q)
    assert abs(m.sum() - q * n * k) <= 1
    assert vals[m].max() <= vals[~m].min() if (~m).any() else True


def test_mask_skips_nan():
    v = np.array([np.nan, 1.0, 2.0, np.nan, 3.0])
    m = percentile_mask(v, 0.4)
    assert m.tolist() == [False, True, False, False, False]
    with pytest.raises(ValueError):
        percentile_mask(v, 1.0)


def test_landscape_shape_and_mask(land):
    assert land.one_minus_p.shape == (60, 60)
    assert land.mask.sum() == 360
    assert np.all(np.isfinite(land.one_minus_p))


def test_parity_corner_excluded(land):
    i, j = land.cell_of(4.0, 0.5)
    assert land.dominant[i, j] == "parity"
    assert not land.mask[i, j]


def test_workers_equivalent(model):
    ej, ec = default_grid(24)
    a = landscape_scan(ej, ec, model, workers=1)
    b = landscape_scan(ej, ec, model, workers=3)
    assert np.array_equal(a.one_minus_p, b.one_minus_p)
    assert np.array_equal(a.mask, b.mask)
    assert np.array_equal(a.dominant, b.dominant)


def test_workers_env(model, monkeypatch):
    from parityswitch.design.metric import worker_count

    monkeypatch.setenv("PARITYSWITCH_WORKERS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("PARITYSWITCH_WORKERS", "x")
    assert worker_count() == 1


# --------------------------------------------------------------------------
# density-matrix oracle

def test_rotations_unitary():
    for ax in range(4):
        u = rotation(ax, 0.7)
        np.testing.assert_allclose(u @ u.conj().T, np.eye(2), atol=1e-15)
    np.testing.assert_allclose(rotation(0, math.pi), -1j * np.array([[0, 1], [1, 0]]), atol=1e-15)


def test_noiseless_circuit(model):
    res = simulate_reference_circuit(12.0, 0.2, model, enabled=())
    assert abs(res.infidelity) < 1e-12
    assert res.n_repetitions == 609


def test_channels_validated(model):
    with pytest.raises(InvalidParameterError):
        simulate_reference_circuit(12.0, 0.2, model, enabled=("bogus",))
    with pytest.raises(InvalidParameterError):
        simulate_reference_circuit(12.0, 0.2, model.replace(model_kind="advanced"))


def test_dm_seed_determinism(model):
    a = simulate_reference_circuit(np.array([12.0, 20.0]), 0.2, model, seed=5, n_repetitions=20)
    b = simulate_reference_circuit(np.array([12.0, 20.0]), 0.2, model, seed=5, n_repetitions=20)
    assert np.array_equal(a.infidelity, b.infidelity)


@pytest.mark.parametrize("t1", [0.125e-3, 0.5e-3])
@pytest.mark.parametrize("point", [(12.0, 0.2), (20.0, 0.25), (15.0, 0.3)])
def test_term_isolation(point, t1):
    """Single-channel oracle infidelity per repetition vs the metric term (first-order regime)."""
    m = NoiseModel(t1, t1)
    iso = isolate_terms(*point, m)
    t = performance_metric(*point, m).terms
    grouped = {"t1": t["t1_tqg"] + t["sqg_t1"], "tphi": t["tphi_tqg"] + t["sqg_tphi"],
               "leak": t["leak"], "parity": t["parity"], "thermal": t["thermal"]}
    for ch in CHANNELS:
        assert float(iso[ch]) == pytest.approx(float(grouped[ch]), rel=0.2), ch


# --------------------------------------------------------------------------
# design loop

def test_reanchor(model):
    new = reanchor(model, {"t1": 1e-4, "tphi": 2e-4, "temperature": 0.03}, (15.0, 0.25))
    assert (new.t1_ref, new.tphi_ref, new.ref_ej, new.ref_ec, new.temperature) == (
        1e-4, 2e-4, 15.0, 0.25, 0.03)
    from parityswitch.design.leakage import sqg_leakage

    assert sqg_leakage(new, 0.3) == pytest.approx(sqg_leakage(model, 0.3), rel=1e-12)
    with pytest.raises(InvalidParameterError):
        reanchor(model, {"t1": 1e-4}, (15.0, 0.25))


def test_loop_converges_inside_mask(model):
    p = optimize_loop({"t1": T_REF, "tphi": T_REF}, (12.0, 0.2), model)
    assert p.converged and (p.e_j, p.e_c) == (12.0, 0.2)


def test_loop_leaves_parity_corner(model):
    p = optimize_loop({"t1": T_REF, "tphi": T_REF}, (6.0, 0.45), model)
    assert not p.converged
    assert p.e_j / p.e_c > 6.0 / 0.45
    assert p.landscape.mask[p.landscape.cell_of(p.e_j, p.e_c)]


def test_parity_share_grows_with_coherence(model):
    share = []
    for t in (0.1e-3, 0.2e-3, 0.4e-3):
        b = optimize_loop({"t1": t, "tphi": t}, (16.0, 0.3), model,
                          grid=default_grid(12)).breakdown
        share.append(b["parity"] / b["one_minus_p"])
    assert np.all(np.diff(share) > 0)
