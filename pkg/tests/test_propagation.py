import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eitmem.propagation import (
    WindowError,
    analytic_slow_light,
    eta_tran,
    omega_c_for_zeta,
    parallel_map,
    propagate_pulse,
    transfer_function,
    vacuum_delay,
)
from eitmem.spectra import lambda_response
from eitmem.units import (
    CS_D1,
    FieldParams,
    GaussianPulse,
    MediumParams,
    ParameterError,
    SampledWaveform,
    make_grid,
    ns_to_gamma,
)

LN2 = math.log(2)
TP = float(ns_to_gamma(207, CS_D1))
FIG3_MED = MediumParams.cs_d1(D=822, gamma31=1.07, gamma21=0.0004)
FIG3_FLD = FieldParams(omega_c=7.41)


def l2_error(a, b):
    return math.sqrt(np.sum(np.abs(a - b) ** 2) / np.sum(np.abs(b) ** 2))


def test_free_propagation_transfer():
    w = np.linspace(-5, 5, 11)
    med = MediumParams(D=0.0)
    h = transfer_function(w, med, FieldParams(), include_vacuum=True)
    assert np.allclose(h, np.exp(1j * w * vacuum_delay(med)), rtol=0, atol=1e-15)
    assert np.all(transfer_function(w, med, FieldParams()) == 1)


def test_dark_state_transfer_is_unimodular():
    h = transfer_function(np.array([0.0]), MediumParams(D=500, gamma31=1.0), FieldParams(omega_c=3.0))
    assert abs(h[0]) == pytest.approx(1.0, abs=1e-15)


def test_transfer_matches_response():
    w = np.linspace(-8, 8, 801)
    h = transfer_function(w, FIG3_MED, FIG3_FLD)
    f = lambda_response(w, FIG3_MED, FIG3_FLD)
    assert np.allclose(np.abs(h) ** 2, np.exp(2 * f.real), rtol=1e-12, atol=1e-300)


def test_fig3_slow_light():
    pulse = GaussianPulse(1.0, TP)
    res = propagate_pulse(make_grid(pulse, FIG3_MED, FIG3_FLD).sample(pulse), FIG3_MED, FIG3_FLD)
    assert res.eta_tran == pytest.approx(0.91, abs=0.02)
    assert res.eta_tran == pytest.approx(0.90752, abs=1e-5)
    ana = analytic_slow_light(pulse, FIG3_MED, FIG3_FLD)
    assert ana["eta_tran"] == pytest.approx(0.90855, abs=1e-5)
    assert ana["t_d"] == pytest.approx(822 / 7.41**2, rel=1e-12)


def test_empty_medium_is_identity():
    pulse = GaussianPulse(1.0, 6.0)
    med, fld = MediumParams(D=0.0), FieldParams()
    wf = make_grid(pulse, med, fld).sample(pulse)
    res = propagate_pulse(wf, med, fld)
    assert l2_error(res.output.amplitude, wf.amplitude) < 1e-10
    assert res.eta_tran == pytest.approx(1.0, abs=1e-12)
    delayed = propagate_pulse(wf, med, fld, include_vacuum=True)
    assert delayed.t_d == pytest.approx(vacuum_delay(med), rel=1e-6)


def test_waveform_matches_closed_form():
    # deep in the quadratic-dispersion regime (D T_p >> zeta)
    pulse = GaussianPulse(1.0, 20.0)
    med = MediumParams(D=1000, gamma31=1.0, gamma21=1e-5)
    fld = FieldParams(omega_c=omega_c_for_zeta(1000, 2.0, 20.0))
    grid = make_grid(pulse, med, fld)
    num = propagate_pulse(grid.sample(pulse), med, fld)
    ana = analytic_slow_light(pulse, med, fld, grid.t)
    assert l2_error(num.output.amplitude, ana["waveform"].amplitude) < 0.005


def test_closed_form_limits():
    pulse = GaussianPulse(1.0, 6.0)
    big = MediumParams(D=1e7, gamma31=0.5)
    res = analytic_slow_light(pulse, big, FieldParams(omega_c=omega_c_for_zeta(1e7, 2.7, 6.0)))
    assert res["beta"] == pytest.approx(1.0, abs=1e-5)
    assert res["eta_tran"] == pytest.approx(1.0, abs=1e-5)
    with pytest.raises(ParameterError):
        analytic_slow_light(pulse, big, FieldParams(omega_c=0.0))


def test_efficiency_examples():
    assert eta_tran(100, 2.7, 0.0, 0.5, TP) == pytest.approx(0.7436, abs=5e-5)
    t_d = 2.7 * 5.95
    assert math.exp(-2 * 1e-4 * t_d) == pytest.approx(0.99679, abs=5e-6)
    assert eta_tran(1e12, 2.7, 1e-4, 0.5, 5.95) == pytest.approx(math.exp(-2 * 1e-4 * t_d), rel=1e-9)


def test_fig4a_point():
    # independent evaluation of the efficiency formula
    tp = float(ns_to_gamma(1000, CS_D1))
    expected = math.exp(-2 * 2e-4 * 2.3 * tp) / math.sqrt(1 + 32 * LN2 * 0.8 * 2.3**2 / 340)
    assert eta_tran(340, 2.3, 2e-4, 0.8, tp) == pytest.approx(expected, rel=1e-14)


@settings(max_examples=100, deadline=None)
@given(D=st.floats(1, 5000), zeta=st.floats(0.1, 6), g21=st.floats(0, 0.01), g31=st.floats(0.05, 3),
       tp=st.floats(0.5, 100), bump=st.floats(1.01, 3))
def test_efficiency_monotonicity(D, zeta, g21, g31, tp, bump):
    base = eta_tran(D, zeta, g21, g31, tp)
    assert 0 <= base <= 1
    assert eta_tran(D, zeta, g21 * bump + 1e-6, g31, tp) <= base
    assert eta_tran(D, zeta, g21, g31 * bump, tp) <= base
    assert eta_tran(D * bump, zeta, g21, g31, tp) >= base


@settings(max_examples=25, deadline=None)
@given(D=st.floats(10, 1000), zeta=st.floats(0.5, 4), g21=st.floats(0, 0.002), g31=st.floats(0.3, 2))
def test_numeric_transmission_is_passive(D, zeta, g21, g31):
    pulse = GaussianPulse(1.0, 6.0)
    med = MediumParams(D=D, gamma31=g31, gamma21=g21)
    fld = FieldParams(omega_c=omega_c_for_zeta(D, zeta, 6.0))
    res = propagate_pulse(make_grid(pulse, med, fld).sample(pulse), med, fld)
    assert res.eta_tran <= 1 + 1e-9
    assert res.beta >= 1 - 1e-6


def test_aliasing_detected():
    pulse = GaussianPulse(1.0, 6.0)
    t = np.linspace(-30, 30, 1024, endpoint=False)
    med = MediumParams(D=800, gamma31=1.0)
    with pytest.raises(WindowError):
        propagate_pulse(pulse.sample(t), med, FieldParams(omega_c=5.0))


def test_needs_power_of_two():
    wf = SampledWaveform(np.arange(100.0), np.ones(100))
    with pytest.raises(ParameterError):
        propagate_pulse(wf, MediumParams(), FieldParams())


def test_parallel_map_keeps_order():
    assert parallel_map(lambda x: x * x, range(20), jobs=4) == [x * x for x in range(20)]
