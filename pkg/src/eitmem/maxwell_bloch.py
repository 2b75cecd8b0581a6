"""Time-domain Maxwell-Bloch integration in the retarded frame.

Coordinates are the normalised depth z in [0, 1] and the retarded time
tau = t - z L / c, in which the probe obeys dOmega/dz = i (D/2) sigma31.
The control field is a prescribed function of tau.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _accel
from .obe import idx, lambda_liouvillian
from .units import FieldParams, MediumParams, ParameterError


class ResolutionError(ValueError):
    pass


@dataclass
class LatticeResult:
    t: np.ndarray
    output: np.ndarray
    nz: int
    snapshot: np.ndarray | None = None  # atomic state per z-node at snap index
    planes: dict = field(default_factory=dict)
    trace_error: float = 0.0


def linear_system(medium: MediumParams, omega_c: float, delta_p: float = 0.0, delta_c: float = 0.0):
    """(A, B, C) of the first-order atomic response driven by Omega_p.

    The state is (sigma31, sigma21) for the Lambda scheme and
    (sigma31, sigma21, sigma41) when the control also couples |2> to the
    switching level |4>.
    """
    d2 = delta_p - delta_c
    if medium.scheme == "NTypeD2":
        omega_s = medium.epsilon_switch * omega_c
        d3 = d2 + medium.delta_s
        a = np.array([
            [1j * delta_p - medium.gamma31, 0.5j * omega_c, 0],
            [0.5j * omega_c, 1j * d2 - medium.gamma21, 0.5j * omega_s],
            [0, 0.5j * omega_s, 1j * d3 - medium.gamma41],
        ], dtype=complex)
    else:
        a = np.array([
            [1j * delta_p - medium.gamma31, 0.5j * omega_c],
            [0.5j * omega_c, 1j * d2 - medium.gamma21],
        ], dtype=complex)
    m = a.shape[0]
    b = np.zeros((m, 1), dtype=complex)
    b[0, 0] = 0.5j
    c = np.zeros((1, m), dtype=complex)
    c[0, 0] = 1.0
    return a, b, c


def max_response(medium: MediumParams) -> float:
    """Upper bound of |f(omega)| used to size the z-grid."""
    if medium.D == 0:
        return 0.0
    if medium.gamma31 == 0:
        return math.inf
    return medium.D / (4 * medium.gamma31)


def choose_nz(medium: MediumParams, nz_min: int = 200, nz_max: int = 4000) -> int:
    need = max_response(medium)
    if not math.isfinite(need):
        return nz_max
    return int(min(max(nz_min, math.ceil(need)), nz_max))


def default_dt(t_p: float, omega_c: float, gamma31: float) -> float:
    return min(t_p / 200, 0.02 / max(omega_c, gamma31, 1e-12))


def check_resolution(dt, t_p, omega_c, gamma31, nz, medium):
    limit = default_dt(t_p, omega_c, gamma31)
    if dt > limit * (1 + 1e-9):
        raise ResolutionError(f"time step {dt:.4g} exceeds the limit {limit:.4g} (T_p/200, 0.02/max(Omega_c, gamma31))")
    if nz < 1:
        raise ResolutionError("need at least one z cell")
    load = max_response(medium) / nz
    if math.isfinite(load) and load > 4:
        raise ResolutionError(f"|f|max * dz = {load:.3g} > 4; use more z cells")


def _segments(values):
    """Unique per-step values and the index of each step into them."""
    values = np.asarray(values, dtype=float)
    uniq, inv = np.unique(values, return_inverse=True)
    return uniq, inv.astype(np.int64)


def run_linear(t, u_in, medium: MediumParams, omega_c_steps, delta_p=0.0, delta_c=0.0,
               nz=None, snap_k=-1, planes=None, backend=None) -> LatticeResult:
    """Propagate ``u_in(t)`` through the medium with a per-step control amplitude."""
    t = np.asarray(t, dtype=float)
    dt = float(t[1] - t[0])
    nz = choose_nz(medium) if nz is None else int(nz)
    omega_c_steps = np.broadcast_to(np.asarray(omega_c_steps, dtype=float), (t.size - 1,))
    uniq, seg = _segments(omega_c_steps)
    systems = [linear_system(medium, oc, delta_p, delta_c) for oc in uniq]
    phi, pa, pb = _accel.segment_tables([s[0] for s in systems], systems[0][1], dt)
    cout = systems[0][2]
    hvec = np.array([0.5j * medium.D / 2 / nz])
    minv = _accel.implicit_factors(pb, cout, hvec)
    plane_list = [] if planes is None else [int(round(p * nz)) for p in planes]
    u_out, snap, plane_fields = _accel.march_linear(
        phi, pa, pb, minv, seg, np.asarray(u_in, dtype=complex)[None, :], cout, hvec,
        nz, snap_k, plane_list, backend=backend)
    planes_dict = {p: plane_fields[i, 0] for i, p in enumerate(planes or [])}
    return LatticeResult(t, u_out[0], nz, snap if snap_k >= 0 else None, planes_dict)


def run_obe(t, u_in, medium: MediumParams, omega_c_steps, delta_p=0.0, delta_c=0.0,
            nz=None, n_iter=2, backend=None) -> LatticeResult:
    """Same lattice with the full (nonlinear) three-level density matrix."""
    if medium.scheme == "NTypeD2":
        raise ParameterError("scheme", "full density-matrix mode covers the Lambda scheme only")
    t = np.asarray(t, dtype=float)
    dt = float(t[1] - t[0])
    nz = choose_nz(medium) if nz is None else int(nz)
    omega_c_steps = np.broadcast_to(np.asarray(omega_c_steps, dtype=float), (t.size - 1,))
    uniq, seg = _segments(omega_c_steps)
    d2 = delta_p - delta_c
    lseg = []
    for oc in uniq:
        l0, gp, gpc = lambda_liouvillian(delta_p, d2, oc, medium.gamma21, medium.gamma31,
                                         medium.gamma32, medium.Gamma31, medium.Gamma32)
        lseg.append(l0)
    rho0 = np.zeros(9, dtype=complex)
    rho0[0] = 1.0
    h = 0.5j * medium.D / 2 / nz
    diag = np.array([idx(3, k, k) for k in range(3)])
    u_out, trace_err = _accel.march_obe(np.array(lseg), gp, gpc, seg, u_in, rho0, idx(3, 2, 0),
                                        diag, h, dt, nz, n_iter, backend=backend)
    return LatticeResult(t, u_out, nz, trace_error=float(trace_err))


def time_domain_slow_light(t, u_in, medium: MediumParams, fld: FieldParams, delta_p=0.0,
                           nz=None, backend=None, mode="linear") -> LatticeResult:
    """Constant-control propagation; the time-domain twin of the FFT route."""
    runner = run_linear if mode == "linear" else run_obe
    return runner(t, u_in, medium, fld.omega_c, delta_p, fld.delta_c, nz=nz, backend=backend)
