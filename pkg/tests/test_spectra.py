import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eitmem.spectra import (
    BandwidthError,
    eit_bandwidth,
    eit_spectrum,
    lambda_response,
    ntype_effective,
    ntype_peak_shift,
    ntype_response,
    ntype_spectrum,
)
from eitmem.units import FieldParams, MediumParams

LN2 = math.log(2)
EPS2 = 48 / 7


def oracle_f(omega, delta_p, D, oc, dc, g21, g31):
    """Lambda response written out independently of the package."""
    a = 1j * (omega + delta_p) - g31
    b = 1j * (omega + delta_p - dc) - g21
    return D / 4 * b / (a * b + oc**2 / 4)


FIG3_MED = MediumParams.cs_d1(D=822, gamma31=1.07, gamma21=0.0004)
FIG3_FLD = FieldParams(omega_c=7.41, delta_c=-0.012)


def test_dark_state_is_transparent():
    assert lambda_response(0.0, MediumParams(D=100), FieldParams(omega_c=2.0)) == 0


def test_two_level_limit():
    f = lambda_response(0.0, MediumParams(D=10, gamma31=0.5), FieldParams(omega_c=0.0))
    assert f == pytest.approx(-5.0)


def test_quadratic_coefficient():
    med, fld = MediumParams(D=300, gamma31=0.8), FieldParams(omega_c=5.0)
    h = 1e-3
    f = lambda w: lambda_response(w, med, fld)
    second = (f(h) - 2 * f(0.0) + f(-h)).real / h**2 / 2
    assert second == pytest.approx(-4 * med.D * med.gamma31 / fld.omega_c**4, rel=1e-5)


def test_matches_independent_formula():
    dp = np.linspace(-6, 6, 401)
    ours = lambda_response(np.zeros_like(dp), FIG3_MED, FIG3_FLD, dp)
    ref = oracle_f(0.0, dp, 822, 7.41, -0.012, 0.0004, 1.07)
    assert np.max(np.abs(ours - ref)) < 1e-12 * np.max(np.abs(ref))


def test_no_medium_is_flat():
    r = eit_spectrum(MediumParams(D=0.0), FieldParams(omega_c=2.0), np.linspace(-5, 5, 101))
    assert np.all(r.transmission == 1.0)


def test_fig3a_spectrum():
    r = eit_spectrum(FIG3_MED, FIG3_FLD)
    assert r.peak_transparency == pytest.approx(0.98810, abs=1e-5)
    assert r.delta_p_grid[np.argmax(r.transmission)] == pytest.approx(-0.012, abs=0.02)
    assert r.transmission.min() < 1e-100  # fully absorbed outside the window


def test_fig3a_bandwidth():
    closed, numeric = eit_bandwidth(FIG3_MED, FIG3_FLD)
    assert closed == pytest.approx(1.090, abs=5e-4)
    assert abs(numeric - closed) / closed < 0.10


def test_bandwidth_scaling_and_errors():
    med = MediumParams(D=400, gamma31=0.9)
    one, _ = eit_bandwidth(med, FieldParams(omega_c=3.0), numeric=False)
    two, _ = eit_bandwidth(med, FieldParams(omega_c=6.0), numeric=False)
    assert two == pytest.approx(4 * one)
    with pytest.raises(BandwidthError):
        eit_bandwidth(MediumParams(D=0.0), FieldParams(omega_c=3.0))


def test_fig_s3d_peak():
    med = MediumParams.cs_d1(D=351, gamma21=0.00024, gamma31=0.82)
    r = eit_spectrum(med, FieldParams(omega_c=2.05, delta_c=0.0075))
    assert r.peak_transparency == pytest.approx(0.96071, abs=1e-5)


def test_ntype_reduces_to_lambda_without_switching():
    med = MediumParams.cs_d2(D=203, gamma21=0.0006, gamma31=0.8, epsilon_switch=0.0)
    fld = FieldParams(omega_c=1.01, delta_c=0.02)
    grid = np.linspace(-3, 3, 601)
    n = ntype_spectrum(med, fld, grid).transmission
    lam = eit_spectrum(med.with_(scheme="LambdaD1", delta_s=0.0), fld, grid).transmission
    assert np.max(np.abs(n - lam)) <= 1e-12


def test_ntype_far_detuned_switch():
    fld = FieldParams(omega_c=1.01)
    grid = np.linspace(-3, 3, 601)

    def gap(ds):
        med = MediumParams.cs_d2(D=203, gamma21=0.0006, gamma31=0.8, delta_s=ds)
        n = ntype_spectrum(med, fld, grid).transmission
        lam = eit_spectrum(med.with_(scheme="LambdaD1", delta_s=0.0), fld, grid).transmission
        return np.max(np.abs(n - lam))

    # residual falls off as 1/delta_s
    assert gap(-1e6) / gap(-1e9) == pytest.approx(1e3, rel=1e-3)
    assert gap(-1e15) <= 1e-12


def test_fig_s3_d2_peaks():
    # stronger control: more photon-switching loss, lower peak
    peaks = {}
    for name, (D, g21, oc) in {"a": (203, 0.0006, 1.01), "c": (225, 0.011, 4.10)}.items():
        med = MediumParams.cs_d2(D=D, gamma21=g21, gamma31=0.8)
        peaks[name] = ntype_spectrum(med, FieldParams(omega_c=oc), delta_c_mode="zero").peak_transparency
    assert peaks["a"] == pytest.approx(0.61971, abs=1e-5)
    assert peaks["c"] == pytest.approx(0.57521, abs=1e-5)
    assert peaks["c"] < 0.75


@settings(max_examples=80, deadline=None)
@given(D=st.floats(0, 2000, allow_subnormal=False), oc=st.floats(0, 20, allow_subnormal=False),
       g21=st.floats(0, 0.05, allow_subnormal=False), g31=st.floats(0.05, 3), dc=st.floats(-1, 1),
       ntype=st.booleans())
def test_transmission_is_passive(D, oc, g21, g31, dc, ntype):
    med = (MediumParams.cs_d2 if ntype else MediumParams.cs_d1)(D=D, gamma21=g21, gamma31=g31)
    grid = np.linspace(-8, 8, 161)
    fld = FieldParams(omega_c=oc, delta_c=dc)
    t = (ntype_spectrum if ntype else eit_spectrum)(med, fld, grid).transmission
    assert np.all(t >= 0) and np.all(t <= 1 + 1e-12)


def test_exact_transparency_on_resonance():
    r = eit_spectrum(MediumParams(D=500, gamma31=1.0), FieldParams(omega_c=4.0), np.array([-0.5, 0.0, 0.5]))
    assert r.transmission[1] == 1.0


def test_effective_quantities():
    med = MediumParams.cs_d2(D=200, gamma21=1e-4, gamma31=0.8)
    same = ntype_effective(med, 0.0, delta2=0.3)
    assert same == {"delta2_eff": 0.3, "gamma21_eff": 1e-4}
    a = ntype_effective(med, 1.0)["gamma21_eff"]
    b = ntype_effective(med, 2.0)["gamma21_eff"]
    assert (b - a) / 3 == pytest.approx(EPS2 * med.gamma41 / (4 * med.delta_s**2), rel=1e-12)
    with pytest.raises(ZeroDivisionError):
        ntype_effective(MediumParams(), 1.0)


def test_fig2a_line():
    med = MediumParams.cs_d2(gamma21=0.0001, gamma31=0.8)
    oc = 3.0
    expected = 0.0001 + EPS2 * oc**2 / (4 * med.delta_s**2) * 0.8
    assert ntype_effective(med, oc)["gamma21_eff"] == pytest.approx(expected, rel=1e-12)


def test_peak_shift_tracks_light_shift():
    med = MediumParams.cs_d2(D=200, gamma21=1e-4, gamma31=0.8)
    ocs = np.array([0.5, 1.0, 1.5])
    shifts = np.array([ntype_peak_shift(med, FieldParams(omega_c=o)) for o in ocs])
    slope = np.polyfit(ocs**2, shifts, 1)[0]
    assert slope < 0  # control sits below the switching level
    assert slope == pytest.approx(EPS2 / (4 * med.delta_s), rel=0.02)


def test_ntype_scalar_and_array_inputs_agree():
    med = MediumParams.cs_d2(D=200, gamma31=0.8)
    fld = FieldParams(omega_c=2.0)
    grid = np.array([-0.2, 0.1])
    arr = ntype_response(0.0, med, fld, grid)
    assert arr.shape == (2,)
    assert arr[1] == ntype_response(0.0, med, fld, 0.1)
