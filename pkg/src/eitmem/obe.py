"""Density-matrix bookkeeping shared by the storage and FWM models.

States are labelled 0..n-1 (|1> is 0).  Density matrices are flattened
row-major, so element (i, j) sits at ``i * n + j``.  Hamiltonians are in
units of Gamma with hbar = 1.
"""

from __future__ import annotations

import numpy as np


def unit(n, i, j):
    m = np.zeros((n, n), dtype=complex)
    m[i, j] = 1.0
    return m


def idx(n, i, j) -> int:
    return i * n + j


def commutator(h):
    """Superoperator of rho -> -i [h, rho]."""
    n = h.shape[0]
    eye = np.eye(n)
    return -1j * (np.kron(h, eye) - np.kron(eye, h.T))


def relaxation(n, coherence, population):
    """Decay superoperator.

    ``coherence`` maps unordered pairs (i, j) to the decay rate of
    rho_ij; ``population`` maps (upper, lower) to a population transfer
    rate.  Populations leave ``upper`` at the summed rate.
    """
    r = np.zeros((n * n, n * n), dtype=complex)
    for (i, j), g in coherence.items():
        r[idx(n, i, j), idx(n, i, j)] -= g
        r[idx(n, j, i), idx(n, j, i)] -= g
    for (up, low), g in population.items():
        r[idx(n, up, up), idx(n, up, up)] -= g
        r[idx(n, low, low), idx(n, up, up)] += g
    return r


def trace_row(n):
    row = np.zeros(n * n, dtype=complex)
    row[[idx(n, k, k) for k in range(n)]] = 1.0
    return row


def steady_state(liou):
    """Trace-one null vector of a Liouvillian (first row replaced by the trace)."""
    n = int(round(np.sqrt(liou.shape[0])))
    m = liou.copy()
    m[0, :] = trace_row(n)
    b = np.zeros(liou.shape[0], dtype=complex)
    b[0] = 1.0
    return np.linalg.solve(m, b)


def lambda_hamiltonian(delta_p, delta_2, omega_c, omega_p=0.0):
    """Three-level Lambda Hamiltonian in the probe/control rotating frame."""
    h = np.diag([0.0, -delta_2, -delta_p]).astype(complex)
    h += -omega_c / 2 * (unit(3, 2, 1) + unit(3, 1, 2))
    h += -omega_p / 2 * unit(3, 2, 0) - np.conj(omega_p) / 2 * unit(3, 0, 2)
    return h


def lambda_liouvillian(delta_p, delta_2, omega_c, gamma21, gamma31, gamma32,
                       Gamma31=0.5, Gamma32=0.5):
    """Probe-free Lambda Liouvillian plus the generators multiplying Omega_p and Omega_p*."""
    l0 = commutator(lambda_hamiltonian(delta_p, delta_2, omega_c))
    l0 += relaxation(3, {(1, 0): gamma21, (2, 0): gamma31, (2, 1): gamma32},
                     {(2, 0): Gamma31, (2, 1): Gamma32})
    gp = commutator(-0.5 * unit(3, 2, 0))
    gpc = commutator(-0.5 * unit(3, 0, 2))
    return l0, gp, gpc
