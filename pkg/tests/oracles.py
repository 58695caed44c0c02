"""Independent dense full-Hilbert-space oracle.

Everything here works on explicit 2^N matrices and bit loops, deliberately
avoiding the package's sector machinery: full H from Pauli tensor products,
partial traces by index arithmetic, partial transposes by bit swaps.

Basis convention matches the package: full-space index == spin configuration
(site i at bit i-1, bit set = up), per-site basis order (down, up).
"""

import numpy as np

SX = np.array([[0.0, 1.0], [1.0, 0.0]])
SY = np.array([[0.0, 1.0j], [-1.0j, 0.0]])
SZ = np.array([[-1.0, 0.0], [0.0, 1.0]])
ID = np.eye(2)


def op_on_site(n, site, op):
    """Embed a single-site operator; site 1 is the least significant bit."""
    return np.kron(np.eye(1 << (n - site)), np.kron(op, np.eye(1 << (site - 1))))


def sigma_dot_sigma(n, a, b):
    out = np.zeros((1 << n, 1 << n), dtype=complex)
    for op in (SX, SY, SZ):
        out += op_on_site(n, a, op) @ op_on_site(n, b, op)
    return out


def dense_hamiltonian(n, bonds):
    """bonds: iterable of (site_a, site_b, strength)."""
    h = np.zeros((1 << n, 1 << n), dtype=complex)
    for a, b, w in bonds:
        h += w * sigma_dot_sigma(n, a, b)
    assert np.max(np.abs(h.imag)) < 1e-12
    return h.real


def dense_ground(n, bonds):
    vals, vecs = np.linalg.eigh(dense_hamiltonian(n, bonds))
    return vals[0], vecs[:, 0]


def partial_trace_vec(psi, n, keep):
    """Reduced density matrix from a full-space vector, by explicit bit loops.

    Reduced index is little-endian over keep sorted ascending (bit j of the
    index = spin at the j-th smallest kept site), matching the package.
    """
    keep = sorted(keep)
    m = len(keep)
    rest = [s for s in range(1, n + 1) if s not in keep]
    rho = np.zeros((1 << m, 1 << m), dtype=complex)
    for r in range(1 << (n - m)):
        base = 0
        for j, s in enumerate(rest):
            base |= ((r >> j) & 1) << (s - 1)
        idx = np.empty(1 << m, dtype=np.int64)
        for k in range(1 << m):
            c = base
            for j, s in enumerate(keep):
                c |= ((k >> j) & 1) << (s - 1)
            idx[k] = c
        sub = psi[idx]
        rho += np.outer(sub, sub.conj())
    return rho


def partial_transpose_dense(rho, m, positions):
    """Transpose the qubits at little-endian bit positions, by index swaps."""
    dim = 1 << m
    out = np.empty_like(rho)
    mask = 0
    for p in positions:
        mask |= 1 << p
    for i in range(dim):
        for j in range(dim):
            ii = (i & ~mask) | (j & mask)
            jj = (j & ~mask) | (i & mask)
            out[i, j] = rho[ii, jj]
    return out


def negativity_dense(rho, m, positions):
    eigs = np.linalg.eigvalsh(partial_transpose_dense(rho, m, positions))
    return max(0.0, float(np.abs(eigs).sum() - 1.0))


def concurrence_dense(rho):
    yy = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))
    m = rho @ yy @ rho.conj() @ yy
    lam = np.sqrt(np.clip(np.real(np.linalg.eigvals(m)), 0.0, None))
    lam[::-1].sort()
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def embed_sector(configs, amplitudes, n):
    """Lift a sector vector to the full 2^n space (index == configuration)."""
    full = np.zeros(1 << n, dtype=amplitudes.dtype)
    full[configs] = amplitudes
    return full


def spectral_propagate(n, bonds, psi_full, t):
    vals, vecs = np.linalg.eigh(dense_hamiltonian(n, bonds))
    return vecs @ (np.exp(-1j * vals * t) * (vecs.conj().T @ psi_full))


def singlet_pair_state(n, pairs):
    """Product of two-site singlets on the given (a, b) pairs, full space."""
    psi = np.zeros(1 << n)
    psi[0] = 1.0
    full = psi
    # build by iterating over pair structure: start from all-down, apply
    # (|up_a down_b> - |down_a up_b>)/sqrt(2) amplitudes combinatorially
    amps = {0: 1.0}
    for a, b in pairs:
        new = {}
        for conf, amp in amps.items():
            new[conf | (1 << (a - 1))] = new.get(conf | (1 << (a - 1)), 0.0) + amp / np.sqrt(2)
            new[conf | (1 << (b - 1))] = new.get(conf | (1 << (b - 1)), 0.0) - amp / np.sqrt(2)
        amps = new
    full = np.zeros(1 << n)
    for conf, amp in amps.items():
        full[conf] = amp
    return full
