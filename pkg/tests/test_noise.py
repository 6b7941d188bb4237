import math
import warnings
from decimal import Decimal, getcontext

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from parityswitch.design.leakage import (
    drag_leakage,
    fit_exponent,
    leakage_table,
    sqg_leakage,
    table_leakage,
)
from parityswitch.design.noise import (
    CircuitSpec,
    NoiseModel,
    flux_averaged_dephasing,
    flux_dephasing_advanced,
    flux_for_shift,
    frequency_of_flux,
    scale_rates,
    thermal_excitation,
    transmon_omega,
)
from parityswitch.errors import InvalidParameterError, TuningRangeError
from parityswitch.units import GHZ, MHZ


@pytest.fixture(scope="module")
def model():
    return NoiseModel(t1_ref=100e-6, tphi_ref=80e-6)


# --------------------------------------------------------------------------
# rate scaling

def test_rates_at_reference(model):
    r = scale_rates(model, model.ref_ej, model.ref_ec)
    assert r.gamma1 == 1 / model.t1_ref
    assert r.gamma_phi == 1 / model.tphi_ref


def test_rate_exponents(model):
    r0 = scale_rates(model, 12.0, 0.2)
    assert scale_rates(model, 12.0, 0.8).gamma1 / r0.gamma1 == pytest.approx(8.0, rel=1e-14)
    assert scale_rates(model, 48.0, 0.2).gamma_phi / r0.gamma_phi == pytest.approx(2.0, rel=1e-14)
    assert scale_rates(model, 48.0, 0.2).gamma1 / r0.gamma1 == pytest.approx(2.0, rel=1e-14)
    assert scale_rates(model, 12.0, 0.8).gamma_phi / r0.gamma_phi == pytest.approx(2.0, rel=1e-14)


@given(st.floats(2.0, 60.0), st.floats(0.05, 0.6), st.floats(1.01, 3.0))
def test_gamma1_monotone_in_product(e_j, e_c, k):
    g = scale_rates(NoiseModel(1e-4, 1e-4), e_j, e_c).gamma1
    assert scale_rates(NoiseModel(1e-4, 1e-4), e_j * k, e_c).gamma1 > g
    assert scale_rates(NoiseModel(1e-4, 1e-4), e_j, e_c * k).gamma1 > g


def test_rates_reject_nonpositive(model):
    with pytest.raises(InvalidParameterError):
        scale_rates(model, 0.0, 0.2)


def test_model_invariants():
    with pytest.raises(InvalidParameterError):
        NoiseModel(0.0, 1e-4)
    with pytest.raises(InvalidParameterError):
        NoiseModel(1e-4, 1e-4, temperature=0.0)
    with pytest.raises(InvalidParameterError):
        NoiseModel(1e-4, 1e-4, leakage_gamma=4.0)
    with pytest.raises(InvalidParameterError):
        NoiseModel(1e-4, 1e-4, junction_asymmetry_d=1.0)
    with pytest.raises(InvalidParameterError):
        NoiseModel(1e-4, 1e-4, model_kind="fancy")
    NoiseModel(1e-4, 1e-4, leakage_gamma="table")


def test_circuit_spec_defaults():
    s = CircuitSpec()
    assert s.weights == {"tqg": 1.0, "sqg_decoherence": 2.0, "sqg_leakage": 1.0}
    assert s.sp_weight(0.5e-3) == pytest.approx(10 * 82e-9 / 0.5e-3, rel=1e-14)
    assert s.n_repetitions(0.5e-3) == 609
    with pytest.raises(InvalidParameterError):
        CircuitSpec(weights={"bogus": 1.0})


# --------------------------------------------------------------------------
# flux noise

def test_sweet_spot_rate_zero(model):
    assert flux_dephasing_advanced(model, 12.0, 0.2, 0.0) == 0.0
    assert flux_dephasing_advanced(model, 12.0, 0.2, 0.5) == pytest.approx(0.0, abs=1e-9)


def test_reference_bias_reproduces_tphi(model):
    phi = flux_for_shift(model.ref_ej, model.ref_ec, 0.9, 10 * MHZ)
    assert flux_dephasing_advanced(model, model.ref_ej, model.ref_ec, phi) == pytest.approx(
        1 / model.tphi_ref, rel=1e-12)


def test_asymmetry_ratio(model):
    a = flux_dephasing_advanced(model.replace(junction_asymmetry_d=0.9), 12.0, 0.2, 0.1)
    b = flux_dephasing_advanced(model.replace(junction_asymmetry_d=0.5), 12.0, 0.2, 0.1)
    assert a / b == pytest.approx(0.2, rel=1e-12)


def test_flux_averaged_scaling(model):
    base = flux_averaged_dephasing(model, 12.0, 0.2)
    assert flux_averaged_dephasing(model, 48.0, 0.2) / base == pytest.approx(2.0, rel=1e-12)
    assert flux_averaged_dephasing(model, 12.0, 0.8) / base == pytest.approx(2.0, rel=1e-12)


@given(st.floats(0.0, 1.0))
def test_flux_for_shift_round_trip(frac):
    e_js, e_c, d = 15.0, 0.25, 0.6
    span = frequency_of_flux(e_js, e_c, d, 0.0) - frequency_of_flux(e_js, e_c, d, 0.5)
    shift = frac * span
    phi = flux_for_shift(e_js, e_c, d, shift)
    assert 0.0 <= phi <= 0.5
    assert frequency_of_flux(e_js, e_c, d, phi) == pytest.approx(
        frequency_of_flux(e_js, e_c, d, 0.0) - shift, abs=1e-6 * GHZ)


def test_unreachable_shift():
    with pytest.raises(TuningRangeError, match="tuning range"):
        flux_for_shift(12.0, 0.2, 0.9, 1.0 * GHZ)
    out = flux_for_shift(12.0, 0.2, 0.9, np.array([0.05, 1.0]) * GHZ, strict=False)
    assert np.isfinite(out[0]) and np.isnan(out[1])
    with pytest.raises(InvalidParameterError):
        flux_for_shift(12.0, 0.2, 0.9, -1.0)


# --------------------------------------------------------------------------
# thermal excitation

def test_thermal_high_precision():
    getcontext().prec = 50
    h, kb = Decimal("6.62607015e-34"), Decimal("1.380649e-23")
    x = h * Decimal(5e9) / (kb * Decimal("0.05"))
    ref = (-x).exp() / (1 + (-x).exp())
    got = thermal_excitation(2 * math.pi * 5e9, 0.05)
    # HBAR carries 10 significant digits
    assert got == pytest.approx(float(ref), rel=1e-8)


def test_thermal_limits():
    assert thermal_excitation(5 * GHZ, 1e-4) == 0.0
    assert thermal_excitation(5 * GHZ, 1e3) == pytest.approx(0.5, abs=1e-3)
    with pytest.raises(InvalidParameterError):
        thermal_excitation(5 * GHZ, 0.0)


@given(st.floats(1.0, 10.0), st.floats(0.01, 0.2))
def test_thermal_decreasing_in_frequency(f, t):
    assert thermal_excitation(2 * f * GHZ, t) < thermal_excitation(f * GHZ, t)


def test_thermal_decreasing_in_sqrt_ejec():
    grid = np.linspace(2.0, 40.0, 30)
    p = thermal_excitation(transmon_omega(grid, 0.2), 0.05)
    assert np.all(np.diff(p) < 0)


# --------------------------------------------------------------------------
# single-qubit-gate leakage

def test_power_law_ratio(model):
    assert sqg_leakage(model, 0.4) / sqg_leakage(model, 0.2) == pytest.approx(2**-5.5, rel=1e-12)


def test_power_law_anchor():
    m = NoiseModel(1e-4, 1e-4, leakage_ref=1e-5)
    assert sqg_leakage(m, m.ref_ec) == 1e-5
    m = NoiseModel(1e-4, 1e-4)
    assert sqg_leakage(m, m.ref_ec) == pytest.approx(table_leakage(m.ref_ec), rel=1e-14)


def test_table_nodes_exact():
    ec, p = leakage_table()
    for k in (0, 7, 13, len(ec) - 1):
        assert table_leakage(ec[k]) == pytest.approx(p[k], rel=1e-12)


def test_table_reproduced_by_simulation():
    ec, p = leakage_table()
    assert drag_leakage(float(ec[5])) == pytest.approx(p[5], rel=1e-6)


def test_table_extrapolation_warns():
    with pytest.warns(UserWarning, match="extrapolating"):
        table_leakage(0.05)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        table_leakage(0.3)


def test_leakage_decreasing_in_ec(model):
    ec = np.linspace(0.1, 0.5, 30)
    assert np.all(np.diff(sqg_leakage(model, ec)) < 0)


@pytest.mark.slow
def test_fitted_exponent_in_range():
    # the three-level DRAG simulation gives gamma close to 4 here
    assert 5.0 <= fit_exponent(0.15, 0.35) <= 6.0
