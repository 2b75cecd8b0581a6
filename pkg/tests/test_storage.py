import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import trapezoid

from eitmem.estimation import gamma31_model
from eitmem.propagation import eta_tran, omega_c_for_zeta
from eitmem.storage import (
    DecayModel,
    StorageProtocol,
    ThresholdError,
    control_profile,
    eta_comp,
    eta_stored,
    gamma21_d2,
    se_vs_od_sweep,
    simulate_storage,
    tbp_at_half,
)
from eitmem.units import CS_D1, FieldParams, GaussianPulse, MediumParams, ParameterError, ns_to_gamma

TP = float(ns_to_gamma(207, CS_D1))
US = float(ns_to_gamma(1e3, CS_D1))


@pytest.fixture(autouse=True)
def _no_adiabatic_noise():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        yield


def test_compression_limits():
    assert eta_comp(50, 100, 1.0) == pytest.approx(1.0)
    assert eta_comp(0, 0, 1.0) == 0.0
    with pytest.raises(ParameterError):
        eta_comp(1, 2, 0.5)


def test_compression_fig_s1_regime():
    beta = math.sqrt(1 + 32 * math.log(2) * 0.5 * 2.5**2 / 100)
    assert eta_comp(1.1, 2.5, beta) > 0.985
    sq = 2 * math.sqrt(math.log(2))
    oracle = 0.5 * (math.erf(sq * 1.1) + math.erf(sq * 1.4 / beta))
    assert eta_comp(1.1, 2.5, beta) == pytest.approx(oracle, rel=1e-14)


@settings(max_examples=50, deadline=None)
@given(kappa=st.floats(0, 5), zeta=st.floats(0, 8), beta=st.floats(1, 4))
def test_compression_is_a_fraction(kappa, zeta, beta):
    assert 0 <= eta_comp(kappa, zeta, beta) < 1 + 1e-15


def test_decay_curve():
    d = DecayModel(A=0.90, tau=325.0)
    assert eta_stored(0.0, d) == 0.90
    assert eta_stored(325.0, d) == pytest.approx(0.90 / math.e)
    assert eta_stored(325.0, d) == pytest.approx(0.331, abs=5e-4)
    t_half = tbp_at_half(d, 1.0)["t_half"]
    assert t_half == pytest.approx(249.2, abs=0.05)
    with_exp = DecayModel(A=1.0, tau=math.inf, gamma21=0.01)
    assert eta_stored(10.0, with_exp) == pytest.approx(math.exp(-0.2))


def test_tbp():
    d = DecayModel(A=0.90, tau=325 * US)
    tb = tbp_at_half(d, TP)
    assert tb["analytic"] == pytest.approx(325 * US * math.sqrt(math.log(1.8)) / TP, rel=1e-12)
    assert tb["analytic"] == pytest.approx(1204, abs=1)
    assert tb["numeric"] == pytest.approx(tb["analytic"], rel=1e-10)
    short = tbp_at_half(d, float(ns_to_gamma(20, CS_D1)))["analytic"]
    assert short == pytest.approx(12460, abs=5)
    near = [tbp_at_half(DecayModel(A=0.5 + e, tau=325 * US), TP)["analytic"] for e in (1e-4, 1e-8, 1e-12)]
    assert near[0] > near[1] > near[2] and near[2] < 3e-3
    with pytest.raises(ThresholdError):
        tbp_at_half(DecayModel(A=0.5, tau=1.0), TP)


def test_protocol_validation():
    with pytest.raises(ParameterError):
        StorageProtocol(t_off=5.0, t_on=4.0)
    with pytest.raises(ParameterError):
        StorageProtocol(ramp="linear")
    with pytest.raises(ParameterError):
        StorageProtocol(kappa=1.0, t_on=1.05).resolve(1.0)  # overlaps the 0.1 T_p ramp


def test_control_profile_shapes():
    t = np.linspace(0, 10, 1001)
    step = control_profile(t, 2.0, 3.0, 4.0, 6.0, 0.0)
    assert np.all(step[t < 4] == 2.0) and np.all(step[(t >= 4) & (t < 6)] == 0) and np.all(step[t >= 6] == 3.0)
    smooth = control_profile(t, 2.0, 2.0, 4.0, 6.0, 1.0)
    assert smooth[np.searchsorted(t, 4.0)] == pytest.approx(1.0)
    assert np.all(np.diff(smooth[t < 5]) <= 1e-15)


def test_lossless_energy_balance():
    med = MediumParams(D=200, gamma31=0.0, gamma21=0.0)
    fld = FieldParams(omega_c=omega_c_for_zeta(200, 3.0, TP))
    r = simulate_storage(GaussianPulse(1e-3, TP), med, fld, StorageProtocol(kappa=1.5))
    assert r.eta_total + r.eta_leak == pytest.approx(1.0, abs=0.01)


def test_empty_medium_leaks_everything():
    r = simulate_storage(GaussianPulse(1e-3, TP), MediumParams(D=0.0), FieldParams(omega_c=2.0))
    assert r.eta_total < 1e-10
    assert r.eta_leak == pytest.approx(1.0, abs=1e-9)


def test_fig3_storage_efficiency():
    med = MediumParams.cs_d1(D=822, gamma31=1.07, gamma21=0.0004)
    fld = FieldParams(omega_c=7.41, delta_c=-0.012)
    t_on = 1.1 * TP + 0.1 * TP + 1e-9  # retrieve as soon as the ramp ends
    r = simulate_storage(GaussianPulse(1e-3, TP), med, fld, StorageProtocol(kappa=1.1, t_on=t_on))
    assert 0.90 <= r.eta_total <= 0.92
    assert r.eta_tran == pytest.approx(0.9073, abs=2e-4)


def test_analytic_hold_applies_decay():
    med = MediumParams(D=300, gamma31=0.7, gamma21=1e-4)
    fld = FieldParams(omega_c=omega_c_for_zeta(300, 2.7, TP))
    pulse = GaussianPulse(1e-3, TP)
    base = simulate_storage(pulse, med, fld, StorageProtocol(kappa=1.3), compute_tran=False)
    t_store = base.info["t_on"] - base.info["t_off"]
    tau = 3 * t_store
    extra = 5000.0
    slow = simulate_storage(pulse, med, fld, StorageProtocol(kappa=1.3, t_on=base.info["t_on"] - pulse.t0 + extra),
                            DecayModel(tau=tau), compute_tran=False)
    assert slow.info["extra_hold"] > extra - 100
    longer = slow.info["t_on"] - base.info["t_on"]
    ratio = slow.eta_total / base.eta_total
    expected = math.exp(-2 * med.gamma21 * longer) * math.exp(-((t_store + longer) ** 2) / tau**2)
    assert ratio == pytest.approx(expected, rel=1e-3)


@pytest.mark.parametrize("ratio", [1.0, 0.8, 1.3])
def test_readout_group_delay(ratio):
    D, tp = 400.0, 5.95
    oc = omega_c_for_zeta(D, 3.0, tp)
    proto = StorageProtocol(kappa=1.5, ramp="step", omega_c_read=ratio * oc)
    res = simulate_storage(GaussianPulse(t_p=tp), MediumParams(D=D, gamma31=0.5), FieldParams(omega_c=oc), proto,
                           compute_tran=False)
    z = np.linspace(0, 1, res.spin_wave.size)
    w = np.abs(res.spin_wave) ** 2
    z_c = trapezoid(z * w, z) / trapezoid(w, z)
    expected = (1 - z_c) * D / (ratio * oc) ** 2
    got = res.retrieved.centroid() - res.info["t_on"]
    assert got == pytest.approx(expected, rel=0.05)


def test_d1_sweep_peak():
    od = np.linspace(10, 1000, 100)
    rows = se_vs_od_sweep(od, "LambdaD1", TP, 2.7, gamma31_model, gamma21=0.0001)
    assert rows["eta"].max() == pytest.approx(0.9104, abs=5e-4)
    at816 = se_vs_od_sweep([816.0], "LambdaD1", TP, 2.7, gamma31_model, gamma21=0.0001)
    assert at816["eta"][0] == pytest.approx(0.9063, abs=5e-4)
    assert at816["gamma31"][0] == pytest.approx(1.0585, abs=5e-4)


def test_sweep_strictly_increasing_without_decoherence():
    od = np.linspace(10, 3000, 300)
    rows = se_vs_od_sweep(od, "LambdaD1", TP, 2.7, lambda d: 0.5, gamma21=0.0)
    assert np.all(np.diff(rows["eta"]) > 0)


def test_d2_sweep_uses_switching_decoherence():
    ds = MediumParams.cs_d2().delta_s
    rows = se_vs_od_sweep([121.0], "NTypeD2", TP, 2.7, lambda d: 0.8, gamma0=0.0005, delta_s=ds)
    oc = omega_c_for_zeta(121.0, 2.7, TP)
    g21 = 0.0005 + (48 / 7) * oc**2 * 0.8 / (4 * ds**2)
    assert rows["gamma21"][0] == pytest.approx(g21, rel=1e-12)
    assert gamma21_d2(oc, 0.8, ds) == pytest.approx(g21, rel=1e-12)
    assert rows["eta"][0] == pytest.approx(eta_tran(121.0, 2.7, g21, 0.8, TP), rel=1e-12)
    with pytest.raises(ParameterError):
        se_vs_od_sweep([], "LambdaD1", TP, 2.7, gamma31_model)
