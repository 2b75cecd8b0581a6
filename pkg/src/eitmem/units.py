"""Parameter containers and unit handling.

Everything inside the package is expressed in units of the excited-state
decay rate Gamma: frequencies and rates are divided by Gamma, times are
multiplied by it.  SI-ish values (MHz, ns, degrees) only appear at the
config/report boundary, through :func:`to_internal` and :func:`to_si`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Optional

import numpy as np
from scipy.integrate import trapezoid

C_LIGHT = 299_792_458.0  # m/s
CS_HYPERFINE_HZ = 9.192_631_770e9
SWITCH_DETUNING_D2_HZ = 251.09e6
EPS_SWITCH = math.sqrt(48.0 / 7.0)
EPS_FWM = -math.sqrt(7.0)
DEFAULT_LENGTH_M = 14e-3

SCHEMES = ("LambdaD1", "NTypeD2", "DoubleLambdaFWM")


class ParameterError(ValueError):
    """Invalid parameter; ``field`` names the offending entry."""

    def __init__(self, field_name: str, message: str):
        self.field = field_name
        super().__init__(f"{field_name}: {message}")


class SizingError(ValueError):
    pass


@dataclass(frozen=True)
class Transition:
    """An optical transition: spontaneous decay rate (rad/s) and wavelength (m)."""

    name: str
    gamma_sp: float
    wavelength: float

    def __post_init__(self):
        if not self.gamma_sp > 0:
            raise ParameterError("gamma_sp", "must be > 0")
        if not self.wavelength > 0:
            raise ParameterError("wavelength", "must be > 0")

    @property
    def k(self) -> float:
        """Vacuum wavenumber in 1/m."""
        return 2 * math.pi / self.wavelength

    @property
    def time_unit_ns(self) -> float:
        return 1e9 / self.gamma_sp


CS_D1 = Transition("CsD1", 2 * math.pi * 4.575e6, 894.6e-9)
CS_D2 = Transition("CsD2", 2 * math.pi * 5.234e6, 852.0e-9)
TRANSITIONS = {"CsD1": CS_D1, "CsD2": CS_D2}


def get_transition(name_or_obj) -> Transition:
    if isinstance(name_or_obj, Transition):
        return name_or_obj
    try:
        return TRANSITIONS[name_or_obj]
    except KeyError:
        raise ParameterError("transition", f"unknown preset {name_or_obj!r}; known: {sorted(TRANSITIONS)}")


def mhz_to_gamma(f_mhz, transition: Transition):
    """Ordinary frequency in MHz (angular 2*pi*f) -> units of Gamma."""
    return 2 * math.pi * np.asarray(f_mhz, dtype=float) * 1e6 / transition.gamma_sp


def gamma_to_mhz(x, transition: Transition):
    return np.asarray(x, dtype=float) * transition.gamma_sp / (2 * math.pi * 1e6)


def ns_to_gamma(t_ns, transition: Transition):
    return np.asarray(t_ns, dtype=float) * 1e-9 * transition.gamma_sp


def gamma_to_ns(t, transition: Transition):
    return np.asarray(t, dtype=float) / transition.gamma_sp * 1e9


def _nonneg(name, value):
    if value is None:
        return
    if not np.isfinite(value) or value < 0:
        raise ParameterError(name, f"must be a finite value >= 0, got {value!r}")


@dataclass(frozen=True)
class MediumParams:
    """Atomic medium, all rates in units of Gamma.

    ``gamma32``/``gamma42`` default to ``gamma31``/``gamma41`` and
    ``gamma41`` defaults to ``gamma31``.  Population branches default to
    an even split.  ``delta_s`` is the detuning of the control field from
    the |2>-|4> switching transition; it is negative for the Cs D2 scheme
    because the control sits below F'=5.
    """

    D: float = 0.0
    gamma31: float = 0.5
    gamma21: float = 0.0
    gamma32: Optional[float] = None
    gamma41: Optional[float] = None
    gamma42: Optional[float] = None
    gamma43: Optional[float] = None
    Gamma31: float = 0.5
    Gamma32: float = 0.5
    Gamma41: float = 0.5
    Gamma42: float = 0.5
    scheme: str = "LambdaD1"
    delta_s: float = 0.0
    delta_hf: float = 0.0
    epsilon_switch: float = EPS_SWITCH
    epsilon_fwm: float = EPS_FWM
    L: float = DEFAULT_LENGTH_M
    transition: str = "CsD1"

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ParameterError("scheme", f"must be one of {SCHEMES}, got {self.scheme!r}")
        for name in ("D", "gamma31", "gamma21", "gamma32", "gamma41", "gamma42", "gamma43",
                     "Gamma31", "Gamma32", "Gamma41", "Gamma42"):
            _nonneg(name, getattr(self, name))
        if not self.L > 0:
            raise ParameterError("L", "must be > 0")
        if self.gamma41 is None:
            object.__setattr__(self, "gamma41", self.gamma31)
        if self.gamma32 is None:
            object.__setattr__(self, "gamma32", self.gamma31)
        if self.gamma42 is None:
            object.__setattr__(self, "gamma42", self.gamma41)
        if self.gamma43 is None:
            object.__setattr__(self, "gamma43", self.gamma31)
        if self.scheme == "NTypeD2" and self.delta_s == 0:
            raise ParameterError("delta_s", "must be nonzero for the NTypeD2 scheme")
        get_transition(self.transition)

    @property
    def Gamma3(self) -> float:
        return self.Gamma31 + self.Gamma32

    @property
    def Gamma4(self) -> float:
        return self.Gamma41 + self.Gamma42

    def with_(self, **changes) -> "MediumParams":
        return replace(self, **changes)

    @classmethod
    def cs_d1(cls, **kw) -> "MediumParams":
        kw.setdefault("delta_hf", float(mhz_to_gamma(CS_HYPERFINE_HZ / 1e6, CS_D1)))
        return cls(scheme=kw.pop("scheme", "LambdaD1"), transition="CsD1", **kw)

    @classmethod
    def cs_d2(cls, **kw) -> "MediumParams":
        kw.setdefault("delta_s", -float(mhz_to_gamma(SWITCH_DETUNING_D2_HZ / 1e6, CS_D2)))
        kw.setdefault("delta_hf", float(mhz_to_gamma(CS_HYPERFINE_HZ / 1e6, CS_D2)))
        return cls(scheme="NTypeD2", transition="CsD2", **kw)


@dataclass(frozen=True)
class FieldParams:
    omega_c: float = 0.0
    delta_c: float = 0.0
    omega_d: float = 0.0
    delta_d: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        _nonneg("omega_c", self.omega_c)
        if not (0.0 <= self.theta < math.pi / 2):
            raise ParameterError("theta", "must lie in [0, pi/2)")

    def with_(self, **changes) -> "FieldParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class GaussianPulse:
    """Gaussian probe, ``omega_p0 * exp(-2 ln2 (t - t0)^2 / t_p^2)``.

    ``t_p`` is the intensity FWHM.
    """

    omega_p0: float = 1e-3
    t_p: float = 1.0
    t0: float = 0.0

    def __post_init__(self):
        if not self.t_p > 0:
            raise ParameterError("t_p", "must be > 0")
        _nonneg("omega_p0", self.omega_p0)

    def check_weak(self, omega_c: float, ratio: float = 0.1) -> bool:
        weak = omega_c > 0 and self.omega_p0 <= ratio * omega_c
        if not weak:
            warnings.warn(
                f"probe Rabi frequency {self.omega_p0:g} is not << control {omega_c:g}; "
                "first-order (weak probe) results may be inaccurate",
                stacklevel=2,
            )
        return weak

    def amplitude(self, t):
        t = np.asarray(t, dtype=float)
        return self.omega_p0 * np.exp(-2 * math.log(2) * (t - self.t0) ** 2 / self.t_p**2)

    def sample(self, t) -> "SampledWaveform":
        t = np.asarray(t, dtype=float)
        return SampledWaveform(t, self.amplitude(t).astype(complex))


@dataclass(frozen=True)
class SampledWaveform:
    """Complex envelope on a uniform time grid (units 1/Gamma and Gamma)."""

    t: np.ndarray
    amplitude: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        a = np.asarray(self.amplitude, dtype=complex)
        if t.ndim != 1 or t.shape != a.shape:
            raise ParameterError("amplitude", "t and amplitude must be 1-D arrays of equal length")
        if t.size >= 3:
            d = np.diff(t)
            if not np.allclose(d, d[0], rtol=1e-9, atol=1e-12 * max(1.0, abs(t[-1]))):
                raise ParameterError("t", "time grid must be uniformly spaced")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "amplitude", a)

    def __len__(self):
        return self.t.size

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    @property
    def is_pow2(self) -> bool:
        n = self.t.size
        return n > 0 and (n & (n - 1)) == 0

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.amplitude) ** 2

    def energy(self) -> float:
        return float(trapezoid(self.intensity, self.t))

    def centroid(self) -> float:
        w = self.intensity
        return float(trapezoid(self.t * w, self.t) / trapezoid(w, self.t))

    def rms_width(self) -> float:
        w = self.intensity
        norm = trapezoid(w, self.t)
        c = trapezoid(self.t * w, self.t) / norm
        return float(np.sqrt(trapezoid((self.t - c) ** 2 * w, self.t) / norm))


# ---------------------------------------------------------------- boundary

# SI-ish key -> (internal key, kind); kind in {"freq", "time", "angle", "plain"}
_SI_KEYS = {
    "omega_c_mhz": ("omega_c", "freq"),
    "delta_c_mhz": ("delta_c", "freq"),
    "omega_d_mhz": ("omega_d", "freq"),
    "delta_d_mhz": ("delta_d", "freq"),
    "theta_deg": ("theta", "angle"),
    "gamma21_mhz": ("gamma21", "freq"),
    "gamma31_mhz": ("gamma31", "freq"),
    "gamma32_mhz": ("gamma32", "freq"),
    "gamma41_mhz": ("gamma41", "freq"),
    "gamma42_mhz": ("gamma42", "freq"),
    "gamma43_mhz": ("gamma43", "freq"),
    "delta_s_mhz": ("delta_s", "freq"),
    "delta_hf_mhz": ("delta_hf", "freq"),
    "omega_p0_mhz": ("omega_p0", "freq"),
    "t_p_ns": ("t_p", "time"),
    "t0_ns": ("t0", "time"),
}
_MEDIUM_KEYS = {f.name for f in fields(MediumParams)}
_FIELD_KEYS = {f.name for f in fields(FieldParams)}
_PULSE_KEYS = {f.name for f in fields(GaussianPulse)}


def to_internal(si: dict, transition="CsD1"):
    """Convert a flat dict of physical values into Gamma-normalised objects.

    Keys ending in ``_mhz`` are ordinary frequencies (the angular value is
    2*pi times it), ``_ns`` are times and ``_deg`` angles; other keys are
    taken as already dimensionless (``D``, ``L`` in metres, ``scheme``,
    branching ratios).  Returns ``(MediumParams, FieldParams, GaussianPulse)``.
    """
    tr = get_transition(transition)
    medium, fld, pulse = {"transition": tr.name}, {}, {}
    for key, value in si.items():
        if key in _SI_KEYS:
            name, kind = _SI_KEYS[key]
            if value is None:
                conv = None
            elif kind == "freq":
                conv = float(mhz_to_gamma(value, tr))
            elif kind == "time":
                conv = float(ns_to_gamma(value, tr))
            else:
                conv = math.radians(value)
            if key in ("t_p_ns",) and value is not None and value <= 0:
                raise ParameterError(key, "duration must be > 0")
            if name.startswith("gamma") and value is not None and value < 0:
                raise ParameterError(key, "rate must be >= 0")
        else:
            name, conv = key, value
        if name in _MEDIUM_KEYS:
            medium[name] = conv
        elif name in _FIELD_KEYS:
            fld[name] = conv
        elif name in _PULSE_KEYS:
            pulse[name] = conv
        else:
            raise ParameterError(key, "unknown parameter")
    return MediumParams(**medium), FieldParams(**fld), GaussianPulse(**pulse)


def to_si(medium: MediumParams, fld: FieldParams, pulse: GaussianPulse) -> dict:
    """Inverse of :func:`to_internal` (rates/detunings in MHz, times in ns)."""
    tr = get_transition(medium.transition)
    internal = {**asdict(medium), **asdict(fld), **asdict(pulse)}
    out = {}
    reverse = {v[0]: (k, v[1]) for k, v in _SI_KEYS.items()}
    for name, value in internal.items():
        if name in reverse:
            key, kind = reverse[name]
            if value is None:
                out[key] = None
            elif kind == "freq":
                out[key] = float(gamma_to_mhz(value, tr))
            elif kind == "time":
                out[key] = float(gamma_to_ns(value, tr))
            else:
                out[key] = math.degrees(value)
        else:
            out[name] = value
    return out


# ---------------------------------------------------------------- grids

@dataclass(frozen=True)
class TimeGrid:
    t: np.ndarray
    omega: np.ndarray  # FFT order, conjugate to t with exp(+i omega t) forward transform
    required: tuple  # (start, stop) interval the grid must cover

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    @property
    def window(self) -> float:
        return float(self.t.size * self.dt)

    @property
    def d_omega(self) -> float:
        return 2 * math.pi / self.window

    def sample(self, pulse: GaussianPulse) -> SampledWaveform:
        return pulse.sample(self.t)


def _next_pow2(n: int) -> int:
    return 1 << max(0, int(math.ceil(math.log2(max(n, 1)))))


def slow_light_estimates(pulse: GaussianPulse, medium: MediumParams, fld: FieldParams):
    """(group delay, broadening factor, EIT bandwidth) from the closed forms; zeros when undefined."""
    if medium.D > 0 and fld.omega_c > 0:
        oc2 = fld.omega_c**2
        t_d = medium.D / oc2
        beta = math.sqrt(1 + 32 * math.log(2) * medium.D * medium.gamma31 / (pulse.t_p**2 * oc2**2))
        bw = math.sqrt(math.log(2) / 2) * oc2 / math.sqrt(medium.D * max(medium.gamma31, 1e-300))
        return t_d, beta, bw
    return 0.0, 1.0, 0.0


MAX_SAMPLES = 2**24


def make_grid(pulse: GaussianPulse, medium: MediumParams, fld: FieldParams,
              n_samples: Optional[int] = None, resolution_factor: float = 50.0) -> TimeGrid:
    """Uniform power-of-two time grid for spectral propagation.

    The grid covers ``[t0 - 4 T_p, t0 + T_d + 4 beta T_p]``, has a
    frequency spacing no coarser than ``bandwidth / resolution_factor`` and
    a Nyquist frequency above 20 pulse spectral widths.
    """
    t_d, beta, bw = slow_light_estimates(pulse, medium, fld)
    start = pulse.t0 - 4 * pulse.t_p
    stop = pulse.t0 + t_d + 4 * beta * pulse.t_p
    span = stop - start
    window = span
    if bw > 0:
        window = max(window, 2 * math.pi * resolution_factor / bw)
    dt_max = math.pi / (20 * 4 * math.log(2) / pulse.t_p)
    if n_samples is None:
        need = window / dt_max
        if need > MAX_SAMPLES:
            raise SizingError(
                f"a {window:.4g}/Gamma window at dt <= {dt_max:.4g}/Gamma needs {need:.3g} samples "
                f"(limit {MAX_SAMPLES}); the EIT bandwidth is too narrow for this pulse"
            )
        n = _next_pow2(int(math.ceil(need)))
        dt = window / n
    else:
        n = int(n_samples)
        if n & (n - 1):
            raise SizingError(f"n_samples={n} is not a power of two")
        dt = window / n
        if dt > dt_max:
            raise SizingError(
                f"{n} samples cannot cover a {window:.4g}/Gamma window at dt <= {dt_max:.4g}/Gamma"
            )
    pad = n * dt - span
    t = start - pad / 2 + dt * np.arange(n)
    omega = 2 * math.pi * np.fft.fftfreq(n, dt)
    return TimeGrid(t=t, omega=omega, required=(start, stop))
