"""Steady-state probe spectra for the Lambda and N-type schemes."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .units import FieldParams, MediumParams, ParameterError


class SingularityError(ArithmeticError):
    pass


class BandwidthError(ValueError):
    pass


@dataclass(frozen=True)
class SpectrumResult:
    delta_p_grid: np.ndarray
    transmission: np.ndarray
    peak_transparency: float
    fwhm_eit: float
    peak_position: float = float("nan")


def _response_lambda(w, delta_p, medium, fld):
    """f(w) for the Lambda system with the probe detuned by ``delta_p``."""
    w = np.asarray(w, dtype=float)
    d2 = delta_p - fld.delta_c
    a = 1j * (w + delta_p) - medium.gamma31
    if fld.omega_c == 0:
        den = a
        num = np.ones_like(a)
    else:
        b = 1j * (w + d2) - medium.gamma21
        num = b
        den = a * b + fld.omega_c**2 / 4
    return _safe_ratio(medium.D / 4 * num, den)


def _safe_ratio(num, den):
    num = np.asarray(num, dtype=complex)
    den = np.asarray(den, dtype=complex)
    bad = den == 0
    if np.any(bad):
        if np.any(num[bad] != 0):
            raise SingularityError("response denominator vanishes (all damping rates zero on a pole)")
    with np.errstate(invalid="ignore", divide="ignore"):
        out = num / np.where(bad, 1.0, den)
    out[bad] = 0.0
    return out


def lambda_response(omega, medium: MediumParams, fld: FieldParams, delta_p=0.0):
    """Field exponent f(omega) of the three-level Lambda medium.

    ``exp(f)`` is the single-pass amplitude transfer at sideband
    ``omega`` around a carrier detuned by ``delta_p``.  Works on scalars
    and arrays.
    """
    out = _response_lambda(np.atleast_1d(omega), delta_p, medium, fld)
    return out[0] if np.ndim(omega) == 0 and np.ndim(delta_p) == 0 else out


def ntype_response(omega, medium: MediumParams, fld: FieldParams, delta_p=0.0,
                   delta_c_mode: str = "direct"):
    """Field exponent of the N-type medium (Lambda + off-resonant switching level).

    ``delta_c_mode="zero"`` drops the control detuning from the response,
    which is how D2 spectra are usually fitted once the light shift has
    been extracted from the Lambda model; ``"direct"`` keeps it.
    """
    if delta_c_mode not in ("direct", "zero"):
        raise ParameterError("delta_c_mode", "must be 'direct' or 'zero'")
    dc = fld.delta_c if delta_c_mode == "direct" else 0.0
    w = np.atleast_1d(np.asarray(omega, dtype=float))
    omega_s = medium.epsilon_switch * fld.omega_c
    d2 = delta_p - dc
    d3 = delta_p - dc + medium.delta_s
    a = 1j * (w + delta_p) - medium.gamma31
    b = 1j * (w + d2) - medium.gamma21
    c = 1j * (w + d3) - medium.gamma41
    num = b * c + omega_s**2 / 4
    den = a * num + c * fld.omega_c**2 / 4
    out = _safe_ratio(medium.D / 4 * num, den)
    return out[0] if np.ndim(omega) == 0 and np.ndim(delta_p) == 0 else out


def response(omega, medium, fld, delta_p=0.0, delta_c_mode="direct"):
    if medium.scheme == "NTypeD2":
        return ntype_response(omega, medium, fld, delta_p, delta_c_mode)
    return lambda_response(omega, medium, fld, delta_p)


def eit_bandwidth_closed(medium: MediumParams, fld: FieldParams) -> float:
    if not medium.D > 0:
        raise BandwidthError("EIT bandwidth undefined for D = 0")
    if not fld.omega_c > 0:
        raise BandwidthError("EIT bandwidth undefined for omega_c = 0")
    if medium.gamma31 == 0:
        return math.inf
    return math.sqrt(math.log(2) / 2) * fld.omega_c**2 / math.sqrt(medium.D * medium.gamma31)


def default_grid(medium, fld, span=6.0, n=801, center=None):
    """Uniform grid with extra points packed around the transparency window."""
    base = np.linspace(-span, span, n)
    if medium.D > 0 and fld.omega_c > 0:
        if center is None:
            center = fld.delta_c
            if medium.scheme == "NTypeD2":
                omega_s = medium.epsilon_switch * fld.omega_c
                center = fld.delta_c + omega_s**2 / (4 * medium.delta_s)
        bw = min(eit_bandwidth_closed(medium, fld), span)
        step = bw / 50
        half = 2 * bw
        dense = center + np.arange(-half, half + step / 2, step)
        base = np.union1d(base, dense[(dense >= -span) & (dense <= span)])
    return base


def _fwhm_about_peak(x, y, i_peak):
    """Full width at half of the local maximum, by linear interpolation."""
    half = y[i_peak] / 2
    if not half > 0:
        return math.nan

    def cross(direction):
        j = i_peak
        while 0 <= j + direction < len(y):
            k = j + direction
            if y[k] <= half:
                # interpolate between j and k
                return x[j] + (x[k] - x[j]) * (y[j] - half) / (y[j] - y[k])
            j = k
        return math.nan

    lo, hi = cross(-1), cross(+1)
    return hi - lo


def _peak_near(x, y, center):
    """Index of the local transmission maximum closest to ``center``."""
    interior = np.flatnonzero((y[1:-1] >= y[:-2]) & (y[1:-1] >= y[2:])) + 1
    if interior.size == 0:
        return int(np.argmax(y))
    return int(interior[np.argmin(np.abs(x[interior] - center))])


def _parabolic(x, y, i):
    if i <= 0 or i >= len(y) - 1:
        return float(x[i])
    x0, x1, x2 = x[i - 1], x[i], x[i + 1]
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    den = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / den
    b = (x2**2 * (y0 - y1) + x1**2 * (y2 - y0) + x0**2 * (y1 - y2)) / den
    if a >= 0:
        return float(x1)
    return float(-b / (2 * a))


def _spectrum(grid, medium, fld, resp):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 3 or not np.all(np.isfinite(grid)):
        raise ParameterError("grid", "need a finite 1-D grid with at least 3 points")
    if np.any(np.diff(grid) <= 0):
        raise ParameterError("grid", "must be strictly increasing")
    f = np.asarray(resp(grid), dtype=complex) if medium.D > 0 else np.zeros(grid.size, complex)
    trans = np.exp(2 * f.real)
    if medium.D > 0 and fld.omega_c > 0:
        center = fld.delta_c
        if medium.scheme == "NTypeD2":
            center += (medium.epsilon_switch * fld.omega_c) ** 2 / (4 * medium.delta_s)
        i = _peak_near(grid, trans, center)
        fwhm = _fwhm_about_peak(grid, trans, i)
        pos = _parabolic(grid, trans, i)
    else:
        fwhm, pos = math.nan, math.nan
    return SpectrumResult(grid, trans, float(trans.max()), float(fwhm), pos)


def eit_spectrum(medium: MediumParams, fld: FieldParams, grid=None) -> SpectrumResult:
    """Intensity transmission exp(2 Re f) of the Lambda medium versus probe detuning."""
    if medium.scheme == "NTypeD2":
        raise ParameterError("scheme", "eit_spectrum needs a Lambda scheme; use ntype_spectrum")
    if grid is None:
        grid = default_grid(medium, fld)
    return _spectrum(grid, medium, fld, lambda d: _response_lambda(np.zeros_like(d), d, medium, fld))


def ntype_spectrum(medium: MediumParams, fld: FieldParams, grid=None,
                   delta_c_mode: str = "direct") -> SpectrumResult:
    if medium.scheme != "NTypeD2":
        raise ParameterError("scheme", "ntype_spectrum needs scheme NTypeD2")
    if grid is None:
        grid = default_grid(medium, fld)
    return _spectrum(grid, medium, fld, lambda d: ntype_response(np.zeros_like(d), medium, fld, d, delta_c_mode))


def spectrum(medium, fld, grid=None, delta_c_mode="direct") -> SpectrumResult:
    if medium.scheme == "NTypeD2":
        return ntype_spectrum(medium, fld, grid, delta_c_mode)
    return eit_spectrum(medium, fld, grid)


def eit_bandwidth(medium: MediumParams, fld: FieldParams, numeric: bool = True):
    """Closed-form EIT bandwidth and, optionally, the FWHM read off a computed spectrum.

    Returns ``(closed, numeric_fwhm)``; the second entry is ``nan`` when
    ``numeric`` is false.
    """
    closed = eit_bandwidth_closed(medium, fld)
    if not numeric:
        return closed, math.nan
    lam = medium.with_(scheme="LambdaD1") if medium.scheme == "NTypeD2" else medium
    span = max(6.0, 3 * closed)
    span = min(span, 2 * fld.omega_c + 6.0)
    step = closed / 200
    n_dense = int(min(4 * closed, span) / step)
    grid = np.union1d(np.linspace(-span, span, 801) + fld.delta_c,
                      fld.delta_c + step * np.arange(-n_dense, n_dense + 1))
    res = eit_spectrum(lam, fld, grid)
    return closed, res.fwhm_eit


def ntype_effective(medium: MediumParams, omega_c: float, delta2: float = 0.0,
                    gamma21=None) -> dict:
    """Light shift and extra ground-state decoherence from the switching level."""
    if medium.delta_s == 0:
        raise ZeroDivisionError("delta_s = 0: effective quantities undefined")
    omega_s = medium.epsilon_switch * omega_c
    if omega_s > 0 and abs(medium.delta_s) / omega_s < 10:
        warnings.warn(
            f"|delta_s|/Omega_s = {abs(medium.delta_s) / omega_s:.3g} < 10; "
            "effective two-photon quantities are approximate",
            stacklevel=2,
        )
    g21 = medium.gamma21 if gamma21 is None else gamma21
    return {
        "delta2_eff": delta2 - omega_s**2 / (4 * medium.delta_s),
        "gamma21_eff": g21 + omega_s**2 * medium.gamma41 / (4 * medium.delta_s**2),
    }


def ntype_peak_shift(medium: MediumParams, fld: FieldParams, half_span=None, n=4001,
                     delta_c_mode="direct") -> float:
    """Probe detuning of the N-type transparency maximum (argmax + parabola)."""
    omega_s = medium.epsilon_switch * fld.omega_c
    guess = fld.delta_c + omega_s**2 / (4 * medium.delta_s)
    if half_span is None:
        try:
            half_span = min(0.5, eit_bandwidth_closed(medium, fld))
        except BandwidthError:
            half_span = 0.5
    grid = np.linspace(guess - half_span, guess + half_span, n)
    t = np.exp(2 * ntype_response(np.zeros_like(grid), medium, fld, grid, delta_c_mode).real)
    return _parabolic(grid, t, int(np.argmax(t)))
