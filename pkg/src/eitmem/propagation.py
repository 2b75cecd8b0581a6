"""Slow-light pulse propagation: FFT route, Gaussian closed form and efficiency."""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .spectra import response
from .units import (
    C_LIGHT,
    FieldParams,
    GaussianPulse,
    MediumParams,
    ParameterError,
    SampledWaveform,
    get_transition,
)

LN2 = math.log(2)


class WindowError(RuntimeError):
    """Output energy wrapped around the FFT window."""


@dataclass(frozen=True)
class PropagationResult:
    output: SampledWaveform
    t_d: float
    beta: float
    eta_tran: float
    zeta: float


def vacuum_delay(medium: MediumParams) -> float:
    """L/c in units of 1/Gamma."""
    return medium.L / C_LIGHT * get_transition(medium.transition).gamma_sp


def transfer_function(omega, medium: MediumParams, fld: FieldParams, delta_p: float = 0.0,
                      include_vacuum: bool = False, delta_c_mode: str = "direct"):
    """Amplitude transfer exp(f(omega) + i omega L/c) of the whole medium."""
    omega = np.asarray(omega, dtype=float)
    f = response(omega, medium, fld, delta_p, delta_c_mode) if medium.D > 0 else np.zeros(omega.shape, complex)
    if include_vacuum:
        f = f + 1j * omega * vacuum_delay(medium)
    return np.exp(f)


def _fwhm_from_rms(sigma_intensity: float) -> float:
    return 2 * math.sqrt(2 * LN2) * sigma_intensity


def propagate_pulse(inp: SampledWaveform, medium: MediumParams, fld: FieldParams,
                    delta_p: float = 0.0, include_vacuum: bool = False,
                    alias_fraction: float = 0.05, alias_tol: float = 1e-4,
                    delta_c_mode: str = "direct") -> PropagationResult:
    """Propagate a sampled envelope through the medium in the frequency domain.

    The envelope is written as x(t) = integral W(w) exp(-i w t) dw, so W is
    obtained with ``ifft`` and the time signal comes back with ``fft``.
    """
    n = len(inp)
    if not inp.is_pow2:
        raise ParameterError("amplitude", f"length {n} is not a power of two")
    dt = inp.dt
    omega = 2 * math.pi * np.fft.fftfreq(n, dt)
    # phase reference at the first sample keeps the time origin where it is
    spec = np.fft.ifft(inp.amplitude)
    h = transfer_function(omega, medium, fld, delta_p, include_vacuum, delta_c_mode)
    out = np.fft.fft(spec * h)

    power = np.abs(out) ** 2
    total = power.sum()
    edge = max(1, int(round(alias_fraction * n)))
    if total > 0:
        tail = max(power[-edge:].sum(), power[:edge].sum())
        if tail > alias_tol * total:
            raise WindowError(
                f"{tail / total:.2e} of the output energy sits in the outer {alias_fraction:.0%} "
                "of the window; enlarge the time grid"
            )

    out_wf = SampledWaveform(inp.t, out)
    e_in = inp.energy()
    e_out = out_wf.energy()
    eta = e_out / e_in if e_in > 0 else math.nan
    if e_out > 0:
        t_d = out_wf.centroid() - inp.centroid()
        beta = out_wf.rms_width() / inp.rms_width()
    else:
        t_d, beta = math.nan, math.nan
    t_p = _fwhm_from_rms(inp.rms_width())
    return PropagationResult(out_wf, float(t_d), float(beta), float(eta), float(t_d / t_p))


def group_delay(medium: MediumParams, fld: FieldParams, include_vacuum: bool = False) -> float:
    if fld.omega_c <= 0:
        raise ParameterError("omega_c", "group delay needs a control field")
    t_d = medium.D / fld.omega_c**2
    if include_vacuum:
        t_d += vacuum_delay(medium)
    return t_d


def broadening(medium: MediumParams, fld: FieldParams, t_p: float) -> float:
    return math.sqrt(1 + 32 * LN2 * medium.D * medium.gamma31 / (t_p**2 * fld.omega_c**4))


def analytic_slow_light(pulse: GaussianPulse, medium: MediumParams, fld: FieldParams, t=None,
                        include_vacuum: bool = False) -> dict:
    """Gaussian output from the quadratic expansion of the EIT response."""
    if fld.omega_c <= 0:
        raise ParameterError("omega_c", "closed-form slow light needs omega_c > 0")
    if fld.delta_c != 0:
        warnings.warn("closed-form slow light assumes two-photon resonance", stacklevel=2)
    if fld.omega_c**2 <= 10 * 4 * medium.gamma21 * medium.gamma31:
        warnings.warn("omega_c^2 is not >> 4 gamma21 gamma31; expansion is inaccurate", stacklevel=2)
    t_d = group_delay(medium, fld, include_vacuum)
    beta = broadening(medium, fld, pulse.t_p)
    eta = math.exp(-2 * medium.gamma21 * medium.D / fld.omega_c**2) / beta
    out = {"t_d": t_d, "beta": beta, "eta_tran": eta, "zeta": t_d / pulse.t_p}
    if t is not None:
        t = np.asarray(t, dtype=float)
        amp = (pulse.omega_p0 / beta * math.exp(-medium.gamma21 * medium.D / fld.omega_c**2)
               * np.exp(-2 * LN2 * ((t - pulse.t0 - t_d) / (beta * pulse.t_p)) ** 2))
        out["waveform"] = SampledWaveform(t, amp.astype(complex))
    return out


def eta_tran(D, zeta, gamma21, gamma31, t_p, rtol: float = 1e-10) -> float:
    """Slow-light energy transmission at fixed delay-to-width ratio.

    Computed twice, once from ``zeta^2/D`` and once from the EIT
    bandwidth; the two must agree.
    """
    if not D > 0:
        raise ParameterError("D", "must be > 0")
    t_d = zeta * t_p
    decay = math.exp(-2 * gamma21 * t_d)
    direct = decay / math.sqrt(1 + 32 * LN2 * gamma31 * zeta**2 / D)
    if gamma31 > 0 and zeta > 0:
        omega_c2 = D / t_d
        bw = math.sqrt(LN2 / 2) * omega_c2 / math.sqrt(D * gamma31)
        via_bw = decay / math.sqrt(1 + 16 * LN2**2 / (bw * t_p) ** 2)
        if not math.isclose(direct, via_bw, rel_tol=rtol, abs_tol=1e-300):
            raise ArithmeticError(f"efficiency forms disagree: {direct!r} vs {via_bw!r}")
    return direct


def omega_c_for_zeta(D, zeta, t_p) -> float:
    """Control Rabi frequency giving delay ``zeta * t_p`` at optical depth ``D``."""
    return math.sqrt(D / (zeta * t_p))


def parallel_map(func, items, jobs: int = 1):
    """Order-preserving map; threads when ``jobs > 1`` (numpy/numba release the GIL)."""
    items = list(items)
    if jobs <= 1 or len(items) < 2:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items))
