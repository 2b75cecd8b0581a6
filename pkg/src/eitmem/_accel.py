"""Hot loops of the time-domain Maxwell-Bloch solver.

Two interchangeable backends are provided for each kernel:

* numba: plain nested loops, compiled with ``@njit``;
* numpy: the same recurrences swept along anti-diagonals of the
  (z, tau) lattice, so every cell on a wavefront is updated at once.

The numba path is used when numba imports and ``EITMEM_DISABLE_NUMBA`` is
not set to a true value.  Both return identical results up to rounding.

Lattice recurrence (linear kernel).  Cell (n, k) is z-node n, time k.  The
atomic state x obeys an exact exponential step with the input taken
piecewise linear in time,

    x[n,k] = Phi x[n,k-1] + Pa u[n,k-1] + Pb u[n,k],      y = C x,

and the fields advance in z with the trapezoid rule

    u[n+1,k] = u[n,k] + h * (y[n,k] + y[n+1,k]),

which is implicit in u[n+1,k] but only through a q x q solve (Minv).
"""

from __future__ import annotations

import os

import numpy as np
from scipy.linalg import expm

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    HAVE_NUMBA = False


def numba_enabled() -> bool:
    flag = os.environ.get("EITMEM_DISABLE_NUMBA", "").strip().lower()
    return HAVE_NUMBA and flag not in ("1", "true", "yes", "on")


def backend_name() -> str:
    return "numba" if numba_enabled() else "numpy"


def _njit(func):
    if HAVE_NUMBA:
        return numba.njit(cache=True, nogil=True)(func)
    return func


# ------------------------------------------------------------ step tables

def segment_tables(a_list, b, h):
    """Exact propagators for x' = A x + B u with u linear over a step of length h.

    Returns ``Phi, Pa, Pb`` stacked over ``a_list``.
    """
    b = np.atleast_2d(np.asarray(b, dtype=complex))
    m, q = b.shape
    size = m + 2 * q
    phis, pas, pbs = [], [], []
    for a in a_list:
        big = np.zeros((size, size), dtype=complex)
        big[:m, :m] = a
        big[:m, m:m + q] = b
        big[m:m + q, m + q:] = np.eye(q)
        e = expm(big * h)
        f1 = e[:m, m:m + q]
        f2 = e[:m, m + q:]
        phis.append(e[:m, :m])
        pas.append(f1 - f2 / h)
        pbs.append(f2 / h)
    return np.array(phis), np.array(pas), np.array(pbs)


def implicit_factors(pb, cout, hvec):
    """inv(I - diag(h) C Pb) per segment, for the trapezoid z-step."""
    q = cout.shape[0]
    out = np.empty((pb.shape[0], q, q), dtype=complex)
    hd = np.diag(hvec)
    for s in range(pb.shape[0]):
        out[s] = np.linalg.inv(np.eye(q) - hd @ cout @ pb[s])
    return out


# ------------------------------------------------------------ linear kernel

@_njit
def _march_linear_nb(phi, pa, pb, minv, seg, u_in, cout, hvec, nz, snap_k, planes):
    q, nt = u_in.shape
    m = phi.shape[1]
    n_planes = planes.shape[0]
    u_old = u_in.copy()
    y_old = np.zeros((q, nt), dtype=np.complex128)
    u_new = np.zeros((q, nt), dtype=np.complex128)
    y_new = np.zeros((q, nt), dtype=np.complex128)
    snap = np.zeros((nz + 1, m), dtype=np.complex128)
    plane_out = np.zeros((n_planes, q, nt), dtype=np.complex128)
    x = np.zeros(m, dtype=np.complex128)
    xt = np.zeros(m, dtype=np.complex128)
    p = np.zeros(q, dtype=np.complex128)
    rhs = np.zeros(q, dtype=np.complex128)

    # node 0: fields are the input, only the atoms evolve
    for i in range(m):
        x[i] = 0.0
    for k in range(1, nt):
        s = seg[k - 1]
        for i in range(m):
            acc = 0.0j
            for j in range(m):
                acc += phi[s, i, j] * x[j]
            for j in range(q):
                acc += pa[s, i, j] * u_old[j, k - 1] + pb[s, i, j] * u_old[j, k]
            xt[i] = acc
        for i in range(m):
            x[i] = xt[i]
        for r in range(q):
            acc = 0.0j
            for i in range(m):
                acc += cout[r, i] * x[i]
            y_old[r, k] = acc
        if k == snap_k:
            for i in range(m):
                snap[0, i] = x[i]
    for ip in range(n_planes):
        if planes[ip] == 0:
            plane_out[ip] = u_old

    for n in range(nz):
        for i in range(m):
            x[i] = 0.0
        for r in range(q):
            u_new[r, 0] = u_old[r, 0] + hvec[r] * y_old[r, 0]
            y_new[r, 0] = 0.0
        for k in range(1, nt):
            s = seg[k - 1]
            for i in range(m):
                acc = 0.0j
                for j in range(m):
                    acc += phi[s, i, j] * x[j]
                for j in range(q):
                    acc += pa[s, i, j] * u_new[j, k - 1]
                xt[i] = acc
            for r in range(q):
                acc = 0.0j
                for i in range(m):
                    acc += cout[r, i] * xt[i]
                p[r] = acc
                rhs[r] = u_old[r, k] + hvec[r] * (y_old[r, k] + p[r])
            for r in range(q):
                acc = 0.0j
                for j in range(q):
                    acc += minv[s, r, j] * rhs[j]
                u_new[r, k] = acc
            for i in range(m):
                acc = xt[i]
                for j in range(q):
                    acc += pb[s, i, j] * u_new[j, k]
                x[i] = acc
            for r in range(q):
                acc = 0.0j
                for i in range(m):
                    acc += cout[r, i] * x[i]
                y_new[r, k] = acc
            if k == snap_k:
                for i in range(m):
                    snap[n + 1, i] = x[i]
        for ip in range(n_planes):
            if planes[ip] == n + 1:
                plane_out[ip] = u_new
        u_old, u_new = u_new, u_old
        y_old, y_new = y_new, y_old
    return u_old.copy(), snap, plane_out


def _march_linear_np(phi, pa, pb, minv, seg, u_in, cout, hvec, nz, snap_k, planes):
    q, nt = u_in.shape
    m = phi.shape[1]
    nodes_all = np.arange(nz + 1)
    X = np.zeros((nz + 1, m), dtype=complex)
    U = np.zeros((nz + 1, q), dtype=complex)  # latest field per node
    Y = np.zeros((nz + 1, q), dtype=complex)  # latest polarisation per node
    u_out = np.zeros((q, nt), dtype=complex)
    snap = np.zeros((nz + 1, m), dtype=complex)
    plane_out = np.zeros((len(planes), q, nt), dtype=complex)
    plane_pos = {int(p): i for i, p in enumerate(planes)}

    for s in range(nt + nz):
        n_lo, n_hi = max(0, s - nt + 1), min(nz, s)
        nodes = nodes_all[n_lo:n_hi + 1]
        k = s - nodes
        # values of the upstream node at the same time, from the previous wavefront
        up = np.maximum(nodes - 1, 0)
        u_up, y_up = U[up], Y[up]

        u = np.empty((nodes.size, q), dtype=complex)
        first = k == 0
        rest = ~first
        if first.any():
            nf = nodes[first]
            X[nf] = 0.0
            u[first] = np.where((nf == 0)[:, None], u_in[:, 0][None, :],
                                u_up[first] + hvec * y_up[first])
        if rest.any():
            nr, kr = nodes[rest], k[rest]
            sg = seg[kr - 1]
            xt = np.einsum("cij,cj->ci", phi[sg], X[nr]) + np.einsum("cij,cj->ci", pa[sg], U[nr])
            p = xt @ cout.T
            rhs = u_up[rest] + hvec * (y_up[rest] + p)
            ur = np.einsum("cij,cj->ci", minv[sg], rhs)
            ur = np.where((nr == 0)[:, None], u_in[:, kr].T, ur)
            u[rest] = ur
            X[nr] = xt + np.einsum("cij,cj->ci", pb[sg], ur)
        U[nodes] = u
        Y[nodes] = X[nodes] @ cout.T

        if n_hi == nz:
            u_out[:, s - nz] = U[nz]
        if 0 <= snap_k:
            hit = nodes[k == snap_k]
            if hit.size:
                snap[hit] = X[hit]
        for node in nodes[np.isin(nodes, planes)]:
            plane_out[plane_pos[int(node)], :, s - node] = U[node]
    return u_out, snap, plane_out


def march_linear(phi, pa, pb, minv, seg, u_in, cout, hvec, nz, snap_k=-1, planes=None,
                 backend=None):
    """Run the linear Maxwell-Bloch lattice; see the module docstring.

    Returns ``(u_out, snap, plane_fields)``: the fields leaving the last
    node, the atomic state of every node at time index ``snap_k`` and the
    fields at the requested node indices.
    """
    planes = np.asarray([] if planes is None else planes, dtype=np.int64)
    args = (np.ascontiguousarray(phi, dtype=complex), np.ascontiguousarray(pa, dtype=complex),
            np.ascontiguousarray(pb, dtype=complex), np.ascontiguousarray(minv, dtype=complex),
            np.ascontiguousarray(seg, dtype=np.int64), np.ascontiguousarray(u_in, dtype=complex),
            np.ascontiguousarray(cout, dtype=complex), np.ascontiguousarray(hvec, dtype=complex),
            int(nz), int(snap_k), planes)
    backend = backend or backend_name()
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is not importable")
        return _march_linear_nb(*args)
    return _march_linear_np(*args)


# ------------------------------------------------------------ nonlinear three-level kernel

@_njit
def _rk4_obe(rho, lmat, gp, gpc, u0, u1, dt):
    um = 0.5 * (u0 + u1)
    d = rho.shape[0]
    k1 = np.zeros(d, dtype=np.complex128)
    k2 = np.zeros(d, dtype=np.complex128)
    k3 = np.zeros(d, dtype=np.complex128)
    k4 = np.zeros(d, dtype=np.complex128)
    tmp = np.zeros(d, dtype=np.complex128)
    for stage in range(4):
        if stage == 0:
            u = u0
            for i in range(d):
                tmp[i] = rho[i]
        elif stage == 1:
            u = um
            for i in range(d):
                tmp[i] = rho[i] + 0.5 * dt * k1[i]
        elif stage == 2:
            u = um
            for i in range(d):
                tmp[i] = rho[i] + 0.5 * dt * k2[i]
        else:
            u = u1
            for i in range(d):
                tmp[i] = rho[i] + dt * k3[i]
        uc = np.conj(u)
        for i in range(d):
            acc = 0.0j
            for j in range(d):
                acc += (lmat[i, j] + u * gp[i, j] + uc * gpc[i, j]) * tmp[j]
            if stage == 0:
                k1[i] = acc
            elif stage == 1:
                k2[i] = acc
            elif stage == 2:
                k3[i] = acc
            else:
                k4[i] = acc
    out = np.zeros(d, dtype=np.complex128)
    for i in range(d):
        out[i] = rho[i] + dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i])
    return out


@_njit
def _march_obe_nb(lseg, gp, gpc, seg, u_in, rho0, out_idx, diag_idx, h, dt, nz, n_iter):
    nt = u_in.shape[0]
    d = rho0.shape[0]
    u_old = u_in.copy()
    y_old = np.zeros(nt, dtype=np.complex128)
    u_new = np.zeros(nt, dtype=np.complex128)
    y_new = np.zeros(nt, dtype=np.complex128)
    trace_err = 0.0
    rho = rho0.copy()
    y_old[0] = rho[out_idx]
    for k in range(1, nt):
        rho = _rk4_obe(rho, lseg[seg[k - 1]], gp, gpc, u_old[k - 1], u_old[k], dt)
        y_old[k] = rho[out_idx]
    for n in range(nz):
        rho = rho0.copy()
        y_new[0] = rho[out_idx]
        u_new[0] = u_old[0] + h * (y_old[0] + y_new[0])
        for k in range(1, nt):
            lm = lseg[seg[k - 1]]
            u1 = u_old[k] + h * (y_old[k] + y_new[k - 1])
            for it in range(n_iter):
                trial = _rk4_obe(rho, lm, gp, gpc, u_new[k - 1], u1, dt)
                u1 = u_old[k] + h * (y_old[k] + trial[out_idx])
            tr_before = 0.0j
            for i in range(diag_idx.shape[0]):
                tr_before += rho[diag_idx[i]]
            rho = _rk4_obe(rho, lm, gp, gpc, u_new[k - 1], u1, dt)
            tr_after = 0.0j
            for i in range(diag_idx.shape[0]):
                tr_after += rho[diag_idx[i]]
            e = abs(tr_after - tr_before)
            if e > trace_err:
                trace_err = e
            u_new[k] = u1
            y_new[k] = rho[out_idx]
        u_old, u_new = u_new, u_old
        y_old, y_new = y_new, y_old
    return u_old.copy(), trace_err


def _rk4_obe_np(rho, lm, gp, gpc, u0, u1, dt):
    um = 0.5 * (u0 + u1)

    def f(r, u):
        gen = lm + u[:, None, None] * gp + np.conj(u)[:, None, None] * gpc
        return np.einsum("cij,cj->ci", gen, r)

    k1 = f(rho, u0)
    k2 = f(rho + 0.5 * dt * k1, um)
    k3 = f(rho + 0.5 * dt * k2, um)
    k4 = f(rho + dt * k3, u1)
    return rho + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def _march_obe_np(lseg, gp, gpc, seg, u_in, rho0, out_idx, diag_idx, h, dt, nz, n_iter):
    nt = u_in.shape[0]
    R = np.tile(rho0, (nz + 1, 1))
    U = np.zeros(nz + 1, dtype=complex)
    Y = np.zeros(nz + 1, dtype=complex)
    u_out = np.zeros(nt, dtype=complex)
    trace_err = 0.0
    nodes_all = np.arange(nz + 1)
    for s in range(nt + nz):
        n_lo, n_hi = max(0, s - nt + 1), min(nz, s)
        nodes = nodes_all[n_lo:n_hi + 1]
        k = s - nodes
        up = np.maximum(nodes - 1, 0)
        u_up, y_up = U[up], Y[up]
        u = np.empty(nodes.size, dtype=complex)
        first = k == 0
        rest = ~first
        if first.any():
            nf = nodes[first]
            R[nf] = rho0
            yf = R[nf, out_idx]
            u[first] = np.where(nf == 0, u_in[0], u_up[first] + h * (y_up[first] + yf))
        if rest.any():
            nr, kr = nodes[rest], k[rest]
            lm = lseg[seg[kr - 1]]
            u_prev = U[nr]
            u1 = u_up[rest] + h * (y_up[rest] + Y[nr])
            at_inlet = nr == 0
            u1 = np.where(at_inlet, u_in[kr], u1)
            for _ in range(n_iter):
                trial = _rk4_obe_np(R[nr], lm, gp, gpc, u_prev, u1, dt)
                u1 = np.where(at_inlet, u_in[kr], u_up[rest] + h * (y_up[rest] + trial[:, out_idx]))
            before = R[nr][:, diag_idx].sum(axis=1)
            R[nr] = _rk4_obe_np(R[nr], lm, gp, gpc, u_prev, u1, dt)
            after = R[nr][:, diag_idx].sum(axis=1)
            trace_err = max(trace_err, float(np.max(np.abs(after - before))))
            u[rest] = u1
        U[nodes] = u
        Y[nodes] = R[nodes, out_idx]
        if n_hi == nz:
            u_out[s - nz] = U[nz]
    return u_out, trace_err


def march_obe(lseg, gp, gpc, seg, u_in, rho0, out_idx, diag_idx, h, dt, nz, n_iter=2,
              backend=None):
    """Nonlinear density-matrix lattice (field fed back through one coherence).

    Returns ``(u_out, max_trace_change_per_step)``.
    """
    args = (np.ascontiguousarray(lseg, dtype=complex), np.ascontiguousarray(gp, dtype=complex),
            np.ascontiguousarray(gpc, dtype=complex), np.ascontiguousarray(seg, dtype=np.int64),
            np.ascontiguousarray(u_in, dtype=complex), np.ascontiguousarray(rho0, dtype=complex),
            int(out_idx), np.ascontiguousarray(diag_idx, dtype=np.int64), complex(h), float(dt),
            int(nz), int(n_iter))
    backend = backend or backend_name()
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is not importable")
        return _march_obe_nb(*args)
    return _march_obe_np(*args)
