"""Four-wave mixing in the double-Lambda system.

Levels (0-based): 0 = |1>, 1 = |2>, 2 = |3>, 3 = |4>.  The probe drives
|1>-|3>, the control |2>-|3>, the control acting as a pump drives |1>-|4>
(Rabi frequency omega_d = epsilon * omega_c) and the idler drives |2>-|4>.
Detunings follow the Hamiltonian diag(0, -delta_2, -delta_p, -delta_d),
delta_2 = delta_p - delta_c.

Everything optical-depth related is expressed through D: the probe obeys
dE_p/dz = (i D / 2L) sigma31 E-units, the idler the same with D scaled by
``idler_ratio`` (1/epsilon^2 by default).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.integrate import trapezoid
from scipy.linalg import expm

from . import _accel
from .maxwell_bloch import choose_nz, default_dt
from .obe import commutator, idx, relaxation, steady_state, trace_row, unit
from .propagation import omega_c_for_zeta
from .units import (
    C_LIGHT,
    CS_HYPERFINE_HZ,
    MAX_SAMPLES,
    GaussianPulse,
    MediumParams,
    ParameterError,
    SizingError,
    get_transition,
    mhz_to_gamma,
)

N = 4
I31 = idx(N, 2, 0)
I42 = idx(N, 3, 1)
I24 = idx(N, 1, 3)


class PoleError(ArithmeticError):
    pass


@dataclass(frozen=True)
class FwmParams:
    """Field configuration for the FWM model (rates in Gamma, k in 1/m, L in m)."""

    omega_c: float
    omega_d: float
    delta_p: float = 0.0
    delta_c: float = 0.0
    delta_d: float = 0.0
    theta: float = 0.0
    k_p: float = 1.0
    k_c: float = 1.0
    k_i: float = 1.0
    L: float = 14e-3

    def __post_init__(self):
        for name in ("k_p", "k_c", "k_i", "L"):
            if not getattr(self, name) > 0:
                raise ParameterError(name, "must be > 0")
        if not (0 <= self.theta < math.pi / 2):
            raise ParameterError("theta", "must lie in [0, pi/2)")

    @property
    def epsilon(self) -> float:
        return self.omega_d / self.omega_c if self.omega_c else math.nan

    def with_(self, **kw) -> "FwmParams":
        return replace(self, **kw)

    @classmethod
    def from_medium(cls, medium: MediumParams, omega_c: float, delta_p: float = 0.0,
                    delta_c: float = 0.0, theta: float = 0.0, omega_d: Optional[float] = None,
                    delta_d: Optional[float] = None, exact_k: bool = False) -> "FwmParams":
        """Defaults: pump = control acting on |1>-|4>, detuned by the hyperfine splitting."""
        tr = get_transition(medium.transition)
        dhf = medium.delta_hf or float(mhz_to_gamma(CS_HYPERFINE_HZ / 1e6, tr))
        k = tr.k
        if exact_k:
            k_c = k - dhf * tr.gamma_sp / C_LIGHT
            k_p, k_i = k, 2 * k_c - k
        else:
            k_p = k_c = k_i = k
        return cls(
            omega_c=omega_c,
            omega_d=medium.epsilon_fwm * omega_c if omega_d is None else omega_d,
            delta_p=delta_p, delta_c=delta_c,
            delta_d=delta_c - dhf if delta_d is None else delta_d,
            theta=theta, k_p=k_p, k_c=k_c, k_i=k_i, L=medium.L,
        )


@dataclass(frozen=True)
class FwmResult:
    chi_pp: complex
    chi_pi: complex
    chi_ip: complex
    chi_ii: complex
    denom_D: complex
    n_c: float
    delta_kz: float
    probe_gain: float = math.nan
    idler_conv: float = math.nan


# ------------------------------------------------------------ Liouvillian

def _rates(medium: MediumParams):
    coh = {(1, 0): medium.gamma21, (2, 0): medium.gamma31, (2, 1): medium.gamma32,
           (3, 0): medium.gamma41, (3, 1): medium.gamma42, (3, 2): medium.gamma43}
    pop = {(2, 0): medium.Gamma31, (2, 1): medium.Gamma32, (3, 0): medium.Gamma41, (3, 1): medium.Gamma42}
    return coh, pop


def hamiltonian(p: FwmParams):
    d2 = p.delta_p - p.delta_c
    h = np.diag([0.0, -d2, -p.delta_p, -p.delta_d]).astype(complex)
    h += -p.omega_c / 2 * unit(N, 2, 1) - np.conj(p.omega_c) / 2 * unit(N, 1, 2)
    h += -p.omega_d / 2 * unit(N, 3, 0) - np.conj(p.omega_d) / 2 * unit(N, 0, 3)
    return h


def liouvillian(p: FwmParams, medium: MediumParams):
    coh, pop = _rates(medium)
    return commutator(hamiltonian(p)) + relaxation(N, coh, pop)


# generators of the weak fields: Omega_p, Omega_p*, Omega_i, Omega_i*
G_P = commutator(-0.5 * unit(N, 2, 0))
G_PC = commutator(-0.5 * unit(N, 0, 2))
G_I = commutator(-0.5 * unit(N, 3, 1))
G_IC = commutator(-0.5 * unit(N, 1, 3))


def zero_order_state(p: FwmParams, medium: MediumParams):
    return steady_state(liouvillian(p, medium))


def _solve_response(mat, gen, s0, static):
    rhs = -gen @ s0
    if static:
        # the Liouvillian is singular at zero frequency; pin the trace change to zero
        mat = mat.copy()
        mat[0, :] = trace_row(N)
        rhs = rhs.copy()
        rhs[0] = 0.0
    return np.linalg.solve(mat, rhs)


def linear_response(p: FwmParams, medium: MediumParams, omega: float = 0.0, s0=None):
    """First-order coefficients (A, B, C, E).

    sigma31 = A Omega_p + B Omega_i*, sigma42 = C Omega_i + E Omega_p*,
    at sideband ``omega`` (fields ~ exp(-i omega t) for the probe class).
    """
    l0 = liouvillian(p, medium)
    if s0 is None:
        s0 = steady_state(l0)
    eye = np.eye(N * N)
    static = omega == 0
    xp = _solve_response(l0 + 1j * omega * eye, G_P, s0, static)
    xic = _solve_response(l0 + 1j * omega * eye, G_IC, s0, static)
    xi = _solve_response(l0 - 1j * omega * eye, G_I, s0, static)
    xpc = _solve_response(l0 - 1j * omega * eye, G_PC, s0, static)
    return xp[I31], xic[I31], xi[I42], xpc[I42]


# ------------------------------------------------------------ literal closed forms

def _xis(p: FwmParams, medium: MediumParams):
    d2 = p.delta_p - p.delta_c
    return {
        "21": 1j * d2 - medium.gamma21,
        "31": 1j * p.delta_p - medium.gamma31,
        "32": 1j * p.delta_c - medium.gamma32,
        "41": 1j * p.delta_d - medium.gamma41,
        "42": 1j * (p.delta_d - d2) - medium.gamma42,
        "43": 1j * (p.delta_d - p.delta_p) - medium.gamma43,
    }


def fwm_zero_order(p: FwmParams, medium: MediumParams, labeling: str = "printed") -> dict:
    """Zero-order populations from the closed-form expressions.

    With ``labeling="printed"`` the expressions are evaluated as printed;
    their Omega_d -> 0 limit puts the population in sigma22.  The exact
    steady state of the Liouvillian agrees with them once the two ground
    labels are exchanged, which ``labeling="physical"`` does.
    """
    if labeling not in ("printed", "physical"):
        raise ParameterError("labeling", "must be 'printed' or 'physical'")
    if p.omega_c == 0 or p.omega_d == 0:
        raise ZeroDivisionError(
            "zero-order populations divide by |Omega_c|^2 and |Omega_d|^2; "
            "for a vanishing field take the limit (Omega_d -> 0 sends everything to one ground state)"
        )
    x = _xis(p, medium)
    G31, G32, G41, G42 = medium.Gamma31, medium.Gamma32, medium.Gamma41, medium.Gamma42
    G3, G4 = G31 + G32, G41 + G42
    oc2, od2 = abs(p.omega_c) ** 2, abs(p.omega_d) ** 2
    c_term = G42 * G3 * abs(x["32"]) ** 2 / (G31 * medium.gamma32 * oc2)
    d_term = G4 * abs(x["41"]) ** 2 / (medium.gamma41 * od2)
    den = 2 * (1 + G42 / G31 + c_term + d_term)
    s11 = G42 / G31 * (1 + 2 * G3 * abs(x["32"]) ** 2 / (medium.gamma32 * oc2)) / den
    s22 = (1 + 2 * d_term) / den
    s33 = G42 / G31 / den
    s44 = 1 / den
    if labeling == "physical":
        s11, s22 = s22, s11
    return {"sigma11": s11, "sigma22": s22, "sigma33": s33, "sigma44": s44}


def chi_literal(p: FwmParams, medium: MediumParams, pops: Optional[dict] = None) -> dict:
    """Closed-form susceptibilities, OD-normalised (n_a d^2/(eps0 hbar) -> D/(2 k L)).

    Kept for comparison with :func:`fwm_susceptibilities`: the forms carry
    the opposite overall sign (Rabi frequencies defined with -d.E) and,
    with the printed populations, only the probe-channel pair tracks the
    exact response.
    """
    if pops is None:
        pops = fwm_zero_order(p, medium)
    x = {k: v for k, v in _xis(p, medium).items()}
    cj = {k: np.conj(v) for k, v in x.items()}
    s11, s22, s33, s44 = pops["sigma11"], pops["sigma22"], pops["sigma33"], pops["sigma44"]
    s1133, s2233, s1144, s2244 = s33 - s11, s33 - s22, s44 - s11, s44 - s22
    e2 = abs(p.omega_d / p.omega_c) ** 2
    o2 = abs(p.omega_c) ** 2
    den = (x["31"] * cj["42"] * x["21"] * cj["43"] / (o2 / 4) + cj["43"] * (cj["42"] + e2 * x["31"])
           + x["21"] * (cj["42"] * e2 + x["31"]) + 0.25 * (e2 - 1) ** 2)
    if den == 0:
        raise PoleError("closed-form denominator vanishes")
    pp = 1j * ((cj["43"] * cj["42"] + 0.25 * o2 * (1 - e2)) / cj["32"] * s2233
               - (cj["42"] * x["21"] * cj["43"] / (o2 / 4) + (e2 * cj["43"] + x["21"])) * s1133
               + e2 * (x["21"] * cj["42"] + 0.25 * o2 * (e2 - 1)) / cj["41"] * s1144) / den
    pi = 1j * p.omega_c * p.omega_d / o2 * ((x["21"] * cj["42"] + 0.25 * o2 * (e2 - 1)) / x["32"] * s2233
                                           + (cj["43"] + x["21"]) * s2244
                                           + cj["43"] * cj["42"] / x["41"] * s1144) / den
    ii = 1j * cj["31"] * (e2 * (4 * x["43"] * cj["31"] + o2 * (e2 - 1)) / (cj["41"] * cj["31"]) * s1144
                          + (4 * cj["21"] * cj["31"] + o2 * (1 - e2)) / (4 * cj["32"] * cj["31"]) * s2233
                          - (cj["21"] * x["43"] / (o2 / 4) + (x["43"] + cj["21"] * e2) / cj["31"]) * s2244) / den
    ip = 1j * cj["31"] * p.omega_c * p.omega_d / o2 * (
        (x["43"] / x["32"] - o2 * (1 - e2) / (4 * x["32"] * cj["31"])) * s2233
        + (x["43"] + cj["21"]) / cj["31"] * s1133
        + (cj["21"] / x["41"] - o2 * (e2 - 1) / (4 * x["41"] * cj["31"])) * s1144) / den
    kp = medium.D / (2 * p.k_p * p.L)
    ki = idler_ratio(medium) * medium.D / (2 * p.k_i * p.L)
    return {"chi_pp": kp * pp, "chi_pi": kp * pi, "chi_ii": ki * ii, "chi_ip": ki * ip, "denom_D": den}


# ------------------------------------------------------------ exact susceptibilities

def idler_ratio(medium: MediumParams) -> float:
    """Idler-to-probe coupling strength ratio, 1/epsilon^2.

    Fixed by the dipole ratio of the atom, so an external pump weaker than
    the control does not change it.
    """
    eps = medium.epsilon_fwm
    if not eps or not math.isfinite(eps):
        return 1.0
    return 1.0 / eps**2


def control_index(p: FwmParams, medium: MediumParams) -> float:
    """Refractive index seen by the control on the far-detuned |1>-|4> line."""
    gamma4 = medium.Gamma4
    kc = medium.D / (2 * p.k_c * p.L)
    chi_c = -kc * p.delta_d / (p.delta_d**2 + gamma4**2 / 4)
    return 1.0 + chi_c / 2


def phase_mismatch(p: FwmParams, n_c: float, literal: bool = False) -> float:
    """Delta k_z in 1/m.  ``literal`` uses k_i sin(theta) for the idler term."""
    if literal:
        return 2 * n_c * p.k_c - p.k_p * math.cos(p.theta) - p.k_i * math.sin(p.theta)
    return 2 * n_c * p.k_c - (p.k_p + p.k_i) * math.cos(p.theta)


def fwm_susceptibilities(p: FwmParams, medium: MediumParams, omega: float = 0.0,
                         literal_dk: bool = False) -> FwmResult:
    """Susceptibilities from the exact first-order steady state of the four-level system."""
    a, b, c, e = linear_response(p, medium, omega)
    if not all(np.isfinite([a, b, c, e])):
        raise PoleError("linear response is singular at these detunings")
    kp = medium.D / (p.k_p * p.L)
    ki = idler_ratio(medium) * medium.D / (p.k_i * p.L)
    n_c = control_index(p, medium)
    dk = phase_mismatch(p, n_c, literal_dk)
    # denominator of the probe-channel response, for reference
    return FwmResult(chi_pp=kp * a, chi_pi=kp * b, chi_ip=ki * e, chi_ii=ki * c,
                     denom_D=chi_literal_denominator(p, medium), n_c=n_c, delta_kz=dk)


def chi_literal_denominator(p: FwmParams, medium: MediumParams) -> complex:
    x = _xis(p, medium)
    cj = {k: np.conj(v) for k, v in x.items()}
    e2 = abs(p.omega_d / p.omega_c) ** 2 if p.omega_c else 0.0
    o2 = abs(p.omega_c) ** 2
    if o2 == 0:
        return complex("nan")
    return complex(x["31"] * cj["42"] * x["21"] * cj["43"] / (o2 / 4) + cj["43"] * (cj["42"] + e2 * x["31"])
                   + x["21"] * (cj["42"] * e2 + x["31"]) + 0.25 * (e2 - 1) ** 2)


def coupled_amplitudes(a_pp, a_pi, a_ii, a_ip, dk, length):
    """Probe and conjugate-idler amplitudes after ``length`` for unit probe input.

    Solves dE_p/dz = a_pp E_p + a_pi e^{i dk z} E_i*, with E_i* obeying the
    conjugate idler equation, via the exact 2x2 exponential.
    """
    b = np.conj(a_ii) + 1j * dk
    c = np.conj(a_ip)
    m = (a_pp + b) / 2
    h = (a_pp - b) / 2
    s = np.sqrt(h * h + a_pi * c + 0j)
    sl = s * length
    if abs(sl) < 1e-6:
        sinh_s = length * (1 + sl * sl / 6)
        cosh = 1 + sl * sl / 2
    else:
        sinh_s = np.sinh(sl) / s
        cosh = np.cosh(sl)
    grow = np.exp(m * length)
    e_p = grow * (cosh + h * sinh_s)
    e_ic = grow * c * sinh_s * np.exp(-1j * dk * length)
    return complex(e_p), complex(e_ic)


def _gain_from_response(p, medium, a, b, c, e, literal_dk=False):
    r = idler_ratio(medium)
    L = p.L
    a_pp = 1j * medium.D / (2 * L) * a
    a_pi = 1j * medium.D / (2 * L) * b
    a_ii = 1j * r * medium.D / (2 * L) * c
    a_ip = 1j * r * medium.D / (2 * L) * e
    n_c = control_index(p, medium)
    dk = phase_mismatch(p, n_c, literal_dk)
    e_p, e_ic = coupled_amplitudes(a_pp, a_pi, a_ii, a_ip, dk, L)
    e_0 = np.exp(a_pp * L)
    return {
        "probe_gain": abs(e_p) ** 2,
        "idler_conv": abs(e_ic) ** 2,
        "no_fwm": abs(e_0) ** 2,
        "gain_ratio": abs(e_p) ** 2 / abs(e_0) ** 2,
        "delta_kz": dk,
        "n_c": n_c,
    }


def fwm_gain_steady(delta_p: float, theta: float, p: FwmParams, medium: MediumParams,
                    literal_dk: bool = False) -> dict:
    """Continuous-wave probe transmission with and without the FWM channel."""
    q = p.with_(delta_p=delta_p, theta=theta)
    a, b, c, e = linear_response(q, medium)
    out = _gain_from_response(q, medium, a, b, c, e, literal_dk)
    out["fwm_gain"] = out["gain_ratio"] - 1
    return out


def fwm_gain_scan(delta_p_grid, theta: float, p: FwmParams, medium: MediumParams,
                  literal_dk: bool = False) -> dict:
    rows = [fwm_gain_steady(float(d), theta, p, medium, literal_dk) for d in delta_p_grid]
    keys = rows[0].keys()
    out = {k: np.array([r[k] for r in rows]) for k in keys}
    out["delta_p"] = np.asarray(delta_p_grid, dtype=float)
    return out


def pump_probe_scan(delta_pump_ghz, p: FwmParams, medium: MediumParams, power_ratio: float = 0.5,
                    delta_p_grid=None) -> dict:
    """Peak steady-state probe transmission with an extra pump beam.

    The pump plays the role of omega_d with Rabi frequency
    epsilon sqrt(power_ratio) omega_c, red-detuned from |1>-|4> by
    ``delta_pump_ghz``.  The reference is the same spectrum with the pump off.
    """
    tr = get_transition(medium.transition)
    if delta_p_grid is None:
        delta_p_grid = np.linspace(-0.4, 0.4, 801)
    grid = np.asarray(delta_p_grid, dtype=float)
    eps = medium.epsilon_fwm
    omega_pump = eps * math.sqrt(power_ratio) * p.omega_c

    def peak(q):
        vals = [fwm_gain_steady(d, q.theta, q, medium)["probe_gain"] for d in grid]
        i = int(np.argmax(vals))
        return vals[i], grid[i]

    ref, ref_at = peak(p.with_(omega_d=0.0))
    pumps = np.atleast_1d(np.asarray(delta_pump_ghz, dtype=float))
    peaks, where = [], []
    for g in pumps:
        dd = -float(mhz_to_gamma(g * 1e3, tr))
        val, at = peak(p.with_(omega_d=omega_pump, delta_d=dd))
        peaks.append(val)
        where.append(at)
    peaks = np.array(peaks)
    return {
        "delta_pump_ghz": pumps,
        "peak_transmission": peaks,
        "peak_delta_p": np.array(where),
        "reference_peak": ref,
        "reference_delta_p": ref_at,
        "excess_gain": peaks / ref - 1,
    }


# ------------------------------------------------------------ pulsed FWM

def _probe_class(l0, seeds):
    """Indices reachable from ``seeds`` under l0 (the probe phase class)."""
    adj = np.abs(l0) > 0
    seen = set()
    todo = list(seeds)
    while todo:
        j = todo.pop()
        if j in seen:
            continue
        seen.add(j)
        todo.extend(np.flatnonzero(adj[:, j]).tolist())
    return np.array(sorted(seen))


def pulse_system(p: FwmParams, medium: MediumParams, fwm_on: bool = True):
    """Reduced linear system driven by (Omega_p, Omega_i*), outputs (sigma31, sigma24).

    Returns (A, B, C, gains) where gains multiply the outputs in the
    z-equation of each field.  With ``fwm_on`` false the idler is held at
    zero and the probe sees only its own response.
    """
    l0 = liouvillian(p, medium)
    s0 = steady_state(l0)
    drive = np.stack([G_P @ s0, G_IC @ s0], axis=1)
    seeds = set(np.flatnonzero(np.abs(drive).sum(axis=1) > 1e-300).tolist()) | {I31, I24}
    cls = _probe_class(l0, seeds)
    pos = {int(j): i for i, j in enumerate(cls)}
    a = l0[np.ix_(cls, cls)]
    b = drive[cls]
    c = np.zeros((2, cls.size), dtype=complex)
    c[0, pos[I31]] = 1.0
    c[1, pos[I24]] = 1.0
    r = idler_ratio(medium)
    gains = np.array([0.5j * medium.D, -0.5j * r * medium.D if fwm_on else 0.0])
    return a, b, c, gains, s0


def spectral_pulse(t, u_p, p: FwmParams, medium: MediumParams, fwm_on: bool = True):
    """Frequency-domain solution of the pulsed problem (reference for the lattice)."""
    a, b, c, gains, _ = pulse_system(p, medium, fwm_on)
    n = len(t)
    dt = t[1] - t[0]
    omega = 2 * math.pi * np.fft.fftfreq(n, dt)
    spec = np.fft.ifft(u_p)
    out = np.empty(n, dtype=complex)
    eye = np.eye(a.shape[0])
    for j, w in enumerate(omega):
        h = -c @ np.linalg.solve(a + 1j * w * eye, b)
        mat = gains[:, None] * h
        out[j] = expm(mat)[0, 0] * spec[j]
    return np.fft.fft(out)


def run_pulse(t, u_p, p: FwmParams, medium: MediumParams, fwm_on: bool = True, nz=None,
              backend=None):
    """Time-domain lattice for probe plus conjugate idler; returns the probe output."""
    a, b, c, gains, _ = pulse_system(p, medium, fwm_on)
    dt = float(t[1] - t[0])
    nz = choose_nz(medium) if nz is None else int(nz)
    phi, pa, pb = _accel.segment_tables([a], b, dt)
    hvec = gains / (2 * nz)
    minv = _accel.implicit_factors(pb, c, hvec)
    u_in = np.zeros((2, len(t)), dtype=complex)
    u_in[0] = u_p
    seg = np.zeros(len(t) - 1, dtype=np.int64)
    u_out, _, _ = _accel.march_linear(phi, pa, pb, minv, seg, u_in, c, hvec, nz, backend=backend)
    return u_out[0], u_out[1]


def fwm_gain_pulse(pulse: GaussianPulse, medium: MediumParams, od_list, zeta: float = 2.7,
                   gamma31_model=None, nz=None, dt=None, backend=None, jobs: int = 1) -> dict:
    """Slow-light transmission versus OD with and without the FWM channel.

    For each OD the control is set to give delay ``zeta * T_p`` and the
    pump is the control itself acting on |1>-|4> (perfect phase matching).
    """
    from .propagation import parallel_map

    ods = np.asarray(list(od_list), dtype=float)
    if ods.size == 0:
        raise ParameterError("od_list", "must not be empty")

    def one(d):
        g31 = medium.gamma31 if gamma31_model is None else float(gamma31_model(d))
        med = medium.with_(D=float(d), gamma31=g31, gamma32=g31, gamma41=g31, gamma42=g31, gamma43=g31)
        oc = omega_c_for_zeta(d, zeta, pulse.t_p)
        p = FwmParams.from_medium(med, oc)
        t_d = d / oc**2
        step = default_dt(pulse.t_p, oc, g31) if dt is None else dt
        t_end = pulse.t0 + t_d + 6 * pulse.t_p + 10 / g31
        n = int(math.ceil((t_end - pulse.t0 + 4 * pulse.t_p) / step)) + 1
        if n > MAX_SAMPLES:
            raise SizingError(f"OD {d:g} needs {n:.3g} time steps (limit {MAX_SAMPLES})")
        t = pulse.t0 - 4 * pulse.t_p + step * np.arange(n)
        u = pulse.amplitude(t).astype(complex)
        e_in = trapezoid(np.abs(u) ** 2, t)
        on, idler = run_pulse(t, u, p, med, True, nz, backend)
        off, _ = run_pulse(t, u, p, med, False, nz, backend)
        e_on = trapezoid(np.abs(on) ** 2, t) / e_in
        e_off = trapezoid(np.abs(off) ** 2, t) / e_in
        return (oc, g31, e_on, e_off, trapezoid(np.abs(idler) ** 2, t) / e_in)

    rows = parallel_map(one, ods, jobs)
    arr = np.array(rows)
    return {
        "D": ods,
        "omega_c": arr[:, 0],
        "gamma31": arr[:, 1],
        "eta_fwm": arr[:, 2],
        "eta_no_fwm": arr[:, 3],
        "idler": arr[:, 4],
        "gain": arr[:, 2] / arr[:, 3],
        "x": ods / (medium.delta_hf or float(mhz_to_gamma(CS_HYPERFINE_HZ / 1e6, get_transition(medium.transition)))),
    }
