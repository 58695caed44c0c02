"""Partial traces and Schmidt decompositions straight from sector vectors.

The full 2^N space is never materialized: amplitudes are regrouped by the
bit patterns of the retained/traced site sets, so memory is set by the
reduced dimension.  Reduced-matrix indices are little-endian over the
retained sites sorted ascending (smallest site = least significant bit,
bit set = spin up).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .basis import PureState, SectorBasis

MAX_KEEP = 14
SCHMIDT_DROP = 1e-12


@dataclass
class ReducedDensity:
    """Reduced density matrix over an ordered list of retained sites."""

    sites: tuple
    matrix: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


@dataclass
class SchmidtData:
    """Bipartition singular-value form: sum_k c_k |left_k> |right_k>."""

    left_sites: tuple
    coefficients: np.ndarray
    left_vectors: np.ndarray  # (2^|left|, rank)
    right_vectors: np.ndarray  # (2^|right|, rank)

    @property
    def rank(self) -> int:
        return len(self.coefficients)


def extract_bits(configs: np.ndarray, sites) -> np.ndarray:
    """Little-endian key of the bits at 1-based ``sites`` (sorted ascending)."""
    key = np.zeros(len(configs), dtype=np.int64)
    for j, s in enumerate(sorted(sites)):
        key |= ((configs >> (s - 1)) & 1) << j
    return key


def _split_keys(basis: SectorBasis, keep):
    keep = sorted(keep)
    n = basis.n_sites
    if any(not 1 <= s <= n for s in keep):
        raise ValueError(f"sites must lie in [1, {n}], got {keep}")
    if len(set(keep)) != len(keep):
        raise ValueError(f"duplicate sites in {keep}")
    rest = [s for s in range(1, n + 1) if s not in set(keep)]
    return keep, extract_bits(basis.configs, keep), extract_bits(basis.configs, rest)


def amplitude_matrix(state: PureState, row_sites) -> np.ndarray:
    """Amplitudes regrouped as a (2^|rows|, n_distinct_rest) matrix.

    Columns are the distinct bit patterns of the complement sites, ascending;
    rho over the row sites is M @ M^dagger and the bipartition Schmidt
    vectors are the singular vectors of M.
    """
    keep, key, rkey = _split_keys(state.basis, row_sites)
    ukeys, inv = np.unique(rkey, return_inverse=True)
    M = np.zeros((1 << len(keep), len(ukeys)), dtype=state.amplitudes.dtype)
    M[key, inv] = state.amplitudes
    return M


def reduce(state: PureState, keep) -> ReducedDensity:
    """Exact partial trace of |state><state| over the complement of ``keep``."""
    keep = sorted(keep)
    if not keep:
        raise ValueError("keep must be nonempty")
    if len(keep) > MAX_KEEP:
        raise ValueError(f"retained subsystem capped at {MAX_KEEP} sites, got {len(keep)}")
    M = amplitude_matrix(state, keep)
    return ReducedDensity(sites=tuple(keep), matrix=M @ M.conj().T)


def schmidt(state: PureState, left_sites) -> SchmidtData:
    """SVD of the left|right bipartition, truncated at coefficient < 1e-12."""
    left = sorted(left_sites)
    n = state.basis.n_sites
    n_right = n - len(left)
    if min(len(left), n_right) > MAX_KEEP:
        raise ValueError(f"smaller bipartition block capped at {MAX_KEEP} sites")
    if not left or n_right == 0:
        raise ValueError("bipartition blocks must both be nonempty")
    keep, key, rkey = _split_keys(state.basis, left)
    ukeys = np.unique(rkey)
    inv = np.searchsorted(ukeys, rkey)
    M = np.zeros((1 << len(keep), len(ukeys)), dtype=state.amplitudes.dtype)
    M[key, inv] = state.amplitudes
    U, s, Vh = np.linalg.svd(M, full_matrices=False)
    rank = int(np.sum(s > SCHMIDT_DROP))
    right = np.zeros((1 << n_right, rank), dtype=Vh.dtype)
    right[ukeys] = Vh[:rank].T
    return SchmidtData(
        left_sites=tuple(left),
        coefficients=s[:rank],
        left_vectors=U[:, :rank],
        right_vectors=right,
    )


def two_site_batch(basis: SectorBasis, psi: np.ndarray, weights: np.ndarray,
                   site_a: int, site_b: int) -> np.ndarray:
    """Weighted sum of two-site reduced matrices over the columns of ``psi``.

    Equals sum_i weights[i] * reduce(psi[:, i], {site_a, site_b}) but batched:
    amplitudes are scattered into (group, key, column) once, then contracted.
    """
    keep, key, rkey = _split_keys(basis, [site_a, site_b])
    ukeys, ginv = np.unique(rkey, return_inverse=True)
    T = np.zeros((len(ukeys), 4, psi.shape[1]), dtype=psi.dtype)
    T[ginv, key, :] = psi
    return np.einsum("gki,gli,i->kl", T, T.conj(), weights, optimize=True)
