"""Light storage: switched-control simulation and the efficiency budget."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import trapezoid
from scipy.optimize import brentq
from scipy.special import erf

from .maxwell_bloch import (
    ResolutionError,
    check_resolution,
    choose_nz,
    default_dt,
    run_linear,
    run_obe,
)
from .propagation import broadening, eta_tran as eta_tran_formula, omega_c_for_zeta
from .units import MAX_SAMPLES, FieldParams, GaussianPulse, MediumParams, ParameterError, SampledWaveform, SizingError

LN2 = math.log(2)
SQ = 2 * math.sqrt(LN2)


class ThresholdError(ValueError):
    pass


# ------------------------------------------------------------ closed forms

def eta_comp(kappa, zeta, beta):
    """Fraction of a Gaussian pulse inside the medium when the control is cut.

    The first term counts what has entered by the cut, the second what has
    not yet left.
    """
    if np.any(np.asarray(beta) < 1):
        raise ParameterError("beta", "must be >= 1")
    leading = erf(SQ * np.asarray(kappa, dtype=float))
    trailing = erf(SQ * (np.asarray(zeta, dtype=float) - kappa) / beta)
    out = 0.5 * (leading + trailing)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class DecayModel:
    """Memory decay A exp(-t^2/tau^2) exp(-2 gamma21 t); times in one consistent unit."""

    A: float = 1.0
    tau: float = math.inf
    gamma21: float = 0.0

    def __post_init__(self):
        if not 0 <= self.A <= 1:
            raise ParameterError("A", "must lie in [0, 1]")
        if not self.tau > 0:
            raise ParameterError("tau", "must be > 0")
        if self.gamma21 < 0:
            raise ParameterError("gamma21", "must be >= 0")


def eta_stored(t_storage, decay: DecayModel):
    t = np.asarray(t_storage, dtype=float)
    if np.any(t < 0):
        raise ParameterError("t_storage", "must be >= 0")
    out = decay.A * np.exp(-(t / decay.tau) ** 2) * np.exp(-2 * decay.gamma21 * t)
    return float(out) if np.ndim(out) == 0 else out


def tbp_at_half(decay: DecayModel, t_p: float) -> dict:
    """Storage time at 50 % efficiency over the input FWHM.

    ``analytic`` ignores the exponential component; ``numeric`` is the
    root of the full decay curve.
    """
    if decay.A <= 0.5:
        raise ThresholdError(f"A = {decay.A} never reaches the 50 % level")
    t_half = decay.tau * math.sqrt(math.log(2 * decay.A))
    hi = t_half if math.isfinite(t_half) and t_half > 0 else 1.0
    while eta_stored(hi, decay) > 0.5:
        hi *= 2
    t_num = brentq(lambda t: eta_stored(t, decay) - 0.5, 0.0, hi, xtol=1e-14 * hi, rtol=1e-14)
    return {"analytic": t_half / t_p, "numeric": t_num / t_p, "t_half": t_num}


# ------------------------------------------------------------ protocol

@dataclass(frozen=True)
class StorageProtocol:
    """Switch timing relative to the input pulse peak (units 1/Gamma).

    ``t_off`` defaults to ``kappa * T_p`` and ``t_on`` to two pulse widths
    after the control has gone.  ``ramp`` is ``"smooth"`` (half-cosine of
    ``ramp_duration``, default 0.1 T_p) or ``"step"``.
    """

    kappa: float = 1.1
    t_off: Optional[float] = None
    t_on: Optional[float] = None
    ramp: str = "smooth"
    ramp_duration: Optional[float] = None
    omega_c_read: Optional[float] = None

    def __post_init__(self):
        if self.ramp not in ("smooth", "step"):
            raise ParameterError("ramp", "must be 'smooth' or 'step'")
        if self.ramp_duration is not None and self.ramp_duration < 0:
            raise ParameterError("ramp_duration", "must be >= 0")
        if self.t_off is not None and self.t_on is not None and not self.t_on > self.t_off:
            raise ParameterError("t_on", "must be later than t_off")

    def resolve(self, t_p: float):
        """Concrete (t_off, t_on, ramp_duration, kappa)."""
        r = 0.0 if self.ramp == "step" else (0.1 * t_p if self.ramp_duration is None else self.ramp_duration)
        t_off = self.kappa * t_p if self.t_off is None else self.t_off
        t_on = t_off + r + 2 * t_p if self.t_on is None else self.t_on
        if not t_on > t_off:
            raise ParameterError("t_on", "must be later than t_off")
        if t_on - t_off < r:
            raise ParameterError("t_on", "switch-on ramp overlaps the switch-off ramp")
        return t_off, t_on, r, t_off / t_p


def control_profile(t, omega_write, omega_read, t_off, t_on, ramp):
    """Control amplitude versus time with half-cosine (or step) transitions."""
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    if ramp > 0:
        s_off = np.clip((t - (t_off - ramp / 2)) / ramp, 0, 1)
        s_on = np.clip((t - (t_on - ramp / 2)) / ramp, 0, 1)
        off_w = 0.5 * (1 + np.cos(math.pi * s_off))
        on_w = 0.5 * (1 - np.cos(math.pi * s_on))
    else:
        off_w = (t < t_off).astype(float)
        on_w = (t >= t_on).astype(float)
    before = t < t_on - ramp / 2
    out[before] = omega_write * off_w[before]
    out[~before] = omega_read * on_w[~before]
    return out


# ------------------------------------------------------------ simulation

@dataclass
class StorageResult:
    eta_total: float
    eta_tran: float
    eta_comp: float
    eta_stored: float
    retrieved: SampledWaveform
    leaked: SampledWaveform
    tbp: Optional[float] = None
    stored_fraction: float = math.nan
    eta_leak: float = math.nan
    zeta: float = math.nan
    beta: float = math.nan
    kappa: float = math.nan
    output: Optional[SampledWaveform] = None
    spin_wave: Optional[np.ndarray] = None
    info: dict = field(default_factory=dict)

    @property
    def decomposition_gap(self) -> float:
        """Relative mismatch of the simulated total against the product of factors."""
        prod = self.eta_tran * self.eta_comp * self.eta_stored
        return abs(self.eta_total - prod) / prod if prod > 0 else math.nan


def _aligned_grid(t_start, t_end, anchors, dt_max):
    """Uniform grid whose nodes hit every anchor time exactly."""
    anchors = sorted(anchors)
    dt = dt_max
    if len(anchors) >= 2:
        gap = anchors[-1] - anchors[0]
        if gap > 0:
            dt = gap / math.ceil(gap / dt_max)
    a0 = anchors[0]
    n_before = math.ceil((a0 - t_start) / dt)
    n_after = math.ceil((t_end - a0) / dt)
    if n_before + n_after + 1 > MAX_SAMPLES:
        raise SizingError(f"the storage run needs {n_before + n_after + 1:.3g} time steps (limit {MAX_SAMPLES})")
    return a0 + dt * np.arange(-n_before, n_after + 1), n_before


def _tail_fraction(wf: SampledWaveform, omega_cut: float) -> float:
    amp = wf.amplitude
    if not np.any(amp):
        return 0.0
    spec = np.abs(np.fft.fft(amp)) ** 2
    w = 2 * math.pi * np.fft.fftfreq(amp.size, wf.dt)
    return float(spec[np.abs(w) > omega_cut].sum() / spec.sum())


def simulate_storage(pulse: GaussianPulse, medium: MediumParams, fld: FieldParams,
                     protocol: StorageProtocol | None = None, decay: DecayModel | None = None,
                     dt: float | None = None, nz: int | None = None, mode: str = "linear",
                     compute_tran: bool = True, backend: str | None = None) -> StorageResult:
    """Write, hold and read a probe pulse with a switched control field.

    Holds longer than the simulated window are applied analytically to the
    spin coherence: free two-photon evolution and, when ``decay`` carries a
    finite ``tau``, the motional amplitude factor exp(-t^2 / (2 tau^2)).
    """
    protocol = protocol or StorageProtocol()
    if mode not in ("linear", "obe"):
        raise ParameterError("mode", "must be 'linear' or 'obe'")
    if fld.omega_c <= 0:
        raise ParameterError("omega_c", "storage needs a control field")
    t_p, t0 = pulse.t_p, pulse.t0
    t_off_rel, t_on_rel, ramp, kappa = protocol.resolve(t_p)
    t_off, t_on = t0 + t_off_rel, t0 + t_on_rel
    omega_w = fld.omega_c
    omega_r = protocol.omega_c_read if protocol.omega_c_read is not None else omega_w

    g31 = medium.gamma31
    settle = 10 / g31 if g31 > 0 else 10 * t_p
    write_end = max(t_off + ramp / 2, t0 + 4 * t_p) + settle
    extra = max(0.0, t_on - write_end)
    t_on_sim = t_on - extra

    t_d_read = medium.D / omega_r**2 if medium.D > 0 else 0.0
    beta = broadening(medium, fld, t_p) if medium.D > 0 else 1.0
    t_start = t0 - 4 * t_p
    t_end = t_on_sim + ramp / 2 + 1.5 * t_d_read + 5 * beta * t_p + settle

    dt_max = default_dt(t_p, max(omega_w, omega_r), g31) if dt is None else dt
    check_resolution(dt_max, t_p, max(omega_w, omega_r), g31, nz or choose_nz(medium), medium)
    t, _ = _aligned_grid(t_start, t_end, [t_off, t_on_sim], dt_max)
    step = t[1] - t[0]
    mids = t[:-1] + step / 2
    oc_steps = control_profile(mids, omega_w, omega_r, t_off, t_on_sim, ramp)
    u_in = pulse.amplitude(t).astype(complex)
    e_in = trapezoid(np.abs(u_in) ** 2, t)

    snap_k = int(np.searchsorted(t, t_off + ramp / 2 - 1e-9 * step))
    if mode == "linear":
        res = run_linear(t, u_in, medium, oc_steps, 0.0, fld.delta_c, nz=nz, snap_k=snap_k,
                         backend=backend)
    else:
        res = run_obe(t, u_in, medium, oc_steps, 0.0, fld.delta_c, nz=nz, backend=backend)
    out = res.output

    split = t_on_sim - ramp / 2
    read_mask = t >= split - 1e-9 * step
    leaked_amp = np.where(read_mask, 0, out)
    t_store = t_on - t_off
    hold = np.exp((1j * (-fld.delta_c) - medium.gamma21) * extra)
    motional = 1.0
    if decay is not None and math.isfinite(decay.tau):
        motional = math.exp(-t_store**2 / (2 * decay.tau**2))
    retrieved_amp = np.where(read_mask, out, 0) * hold * motional
    retrieved = SampledWaveform(t + extra, retrieved_amp)
    leaked = SampledWaveform(t, leaked_amp)
    e_ret = trapezoid(np.abs(retrieved_amp) ** 2, t)
    e_leak = trapezoid(np.abs(leaked_amp) ** 2, t)

    stored_fraction = math.nan
    spin = None
    if res.snapshot is not None:
        z = np.linspace(0, 1, res.nz + 1)
        dens = np.sum(np.abs(res.snapshot) ** 2, axis=1)
        stored_fraction = float(medium.D * trapezoid(dens, z) / e_in)
        spin = res.snapshot[:, 1].copy()

    eta_t = math.nan
    if compute_tran:
        if mode == "linear":
            ref = run_linear(t, u_in, medium, omega_w, 0.0, fld.delta_c, nz=res.nz, backend=backend)
        else:
            ref = run_obe(t, u_in, medium, omega_w, 0.0, fld.delta_c, nz=res.nz, backend=backend)
        eta_t = float(trapezoid(np.abs(ref.output) ** 2, t) / e_in)

    zeta = (medium.D / omega_w**2) / t_p
    comp = eta_comp(kappa, zeta, beta)
    model = decay or DecayModel(A=1.0, gamma21=medium.gamma21)
    stored = eta_stored(t_store, DecayModel(1.0, model.tau, medium.gamma21))

    cut = 3 * max(4 * LN2 / t_p, omega_r**2 / math.sqrt(max(medium.D * g31, 1e-300)) if medium.D > 0 else 0.0)
    tail = _tail_fraction(SampledWaveform(t, np.where(read_mask, out, 0)), cut)
    if tail > 0.01:
        warnings.warn(f"{tail:.1%} of the retrieved energy lies outside the EIT band; switching is not adiabatic",
                      stacklevel=2)

    info = {
        "t_off": t_off, "t_on": t_on, "ramp": ramp, "extra_hold": extra, "dt": float(step),
        "nz": res.nz, "mode": mode, "trace_error": res.trace_error, "tail_fraction": tail,
    }
    return StorageResult(
        eta_total=float(e_ret / e_in), eta_tran=eta_t, eta_comp=float(comp), eta_stored=float(stored),
        retrieved=retrieved, leaked=leaked, stored_fraction=stored_fraction,
        eta_leak=float(e_leak / e_in), zeta=zeta, beta=beta, kappa=kappa,
        output=SampledWaveform(t, out), spin_wave=spin, info=info,
    )


# ------------------------------------------------------------ OD sweeps

def gamma21_d2(omega_c, gamma41, delta_s, gamma0=0.0005, epsilon=math.sqrt(48 / 7)):
    """Ground decoherence of the D2 scheme including photon switching."""
    return gamma0 + (epsilon * omega_c) ** 2 * gamma41 / (4 * delta_s**2)


def se_vs_od_sweep(od_list, scheme: str, t_p: float, zeta: float, gamma31_model,
                   gamma21: float = 0.0001, gamma0: float = 0.0005, delta_s: float | None = None,
                   epsilon: float = math.sqrt(48 / 7)) -> dict:
    """Slow-light efficiency versus optical depth at fixed delay ratio.

    ``gamma31_model(D)`` supplies the excited-state dephasing (and
    gamma41 for the D2 scheme).  Returns arrays keyed by column name.
    """
    od = np.asarray(list(od_list), dtype=float)
    if od.size == 0:
        raise ParameterError("od_list", "must not be empty")
    if np.any(od <= 0):
        raise ParameterError("od_list", "optical depths must be > 0")
    if scheme == "NTypeD2" and not delta_s:
        raise ParameterError("delta_s", "needed for the NTypeD2 sweep")
    rows = {"D": od, "omega_c": np.empty_like(od), "gamma31": np.empty_like(od),
            "gamma21": np.empty_like(od), "eta": np.empty_like(od)}
    for i, d in enumerate(od):
        g31 = float(gamma31_model(d))
        oc = omega_c_for_zeta(d, zeta, t_p)
        g21 = gamma21 if scheme != "NTypeD2" else gamma21_d2(oc, g31, delta_s, gamma0, epsilon)
        rows["omega_c"][i] = oc
        rows["gamma31"][i] = g31
        rows["gamma21"][i] = g21
        rows["eta"][i] = eta_tran_formula(d, zeta, g21, g31, t_p)
    return rows
