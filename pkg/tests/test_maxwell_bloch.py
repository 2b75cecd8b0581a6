import math
import os
import subprocess
import sys

import numpy as np
import pytest

from eitmem import _accel
from eitmem.maxwell_bloch import (
    ResolutionError,
    check_resolution,
    choose_nz,
    default_dt,
    run_linear,
    run_obe,
    time_domain_slow_light,
)
from eitmem.propagation import propagate_pulse
from eitmem.units import FieldParams, GaussianPulse, MediumParams, make_grid

T = np.arange(-30, 80, 0.01)
U = GaussianPulse(1e-4, 5.95).amplitude(T).astype(complex)
MED = MediumParams(D=100, gamma31=0.5, gamma21=0.001)


def test_nz_rule():
    assert choose_nz(MediumParams(D=10)) == 200
    assert choose_nz(MediumParams(D=1000, gamma31=1.0)) == 250  # ceil(D / (4 gamma31))
    assert choose_nz(MediumParams(D=1e6)) == 4000


def test_dt_rule_and_resolution_error():
    assert default_dt(5.95, 7.41, 1.07) == pytest.approx(min(5.95 / 200, 0.02 / 7.41))
    with pytest.raises(ResolutionError):
        check_resolution(1.0, 5.95, 7.41, 1.07, 200, MediumParams(D=822, gamma31=1.07))


def test_weak_probe_obe_matches_linear():
    lin = run_linear(T, U, MED, 3.0, nz=200)
    full = run_obe(T, U, MED, 3.0, nz=200)
    assert np.max(np.abs(lin.output - full.output)) / np.max(np.abs(U)) < 1e-6
    assert full.trace_error < 1e-8


@pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")
def test_backends_agree():
    a = run_linear(T, U, MED, 3.0, nz=200, backend="numba")
    b = run_linear(T, U, MED, 3.0, nz=200, backend="numpy")
    assert np.max(np.abs(a.output - b.output)) / np.max(np.abs(U)) < 1e-12
    c = run_obe(T, U, MED, 3.0, nz=100, backend="numba")
    d = run_obe(T, U, MED, 3.0, nz=100, backend="numpy")
    assert np.max(np.abs(c.output - d.output)) / np.max(np.abs(U)) < 1e-12


def test_env_switch_selects_numpy():
    code = "from eitmem import _accel; print(_accel.backend_name())"
    env = dict(os.environ, EITMEM_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


def test_constant_control_matches_spectral_route():
    pulse = GaussianPulse(1.0, 6.0)
    med, fld = MediumParams(D=200, gamma31=0.7), FieldParams(omega_c=3.0)
    g = make_grid(pulse, med, fld)
    n = len(g.t)
    while g.window / n > default_dt(pulse.t_p, fld.omega_c, med.gamma31):
        n *= 2
    g = make_grid(pulse, med, fld, n_samples=n)
    wf = g.sample(pulse)
    ref = propagate_pulse(wf, med, fld).output.amplitude
    lat = time_domain_slow_light(g.t, wf.amplitude, med, fld).output
    err = math.sqrt(np.sum(np.abs(lat - ref) ** 2) / np.sum(np.abs(ref) ** 2))
    assert err < 0.005
