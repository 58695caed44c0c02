"""Bond lists for each chain variant and sector-restricted H application.

Couplings multiply sigma.sigma with sigma the Pauli matrices (eigenvalues
+-1), exactly as written in the model Hamiltonian; a two-site singlet has
energy -3 per unit bond strength in these units.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import kernels
from .basis import ChainSpec, SectorBasis, enumerate_sector, sector_of_ground_state

# Above this sector dimension the cached-sparse mode is not built
# automatically (memory trade-off; matrix-free kernel takes over).
SPARSE_CACHE_MAX_DIM = 100_000


@dataclass(frozen=True)
class Bond:
    """One sigma.sigma coupling between 1-based sites a < b with |b-a| <= 2."""

    site_a: int
    site_b: int
    strength: float

    def __post_init__(self):
        if not self.site_a < self.site_b:
            raise ValueError(f"bond sites must satisfy a < b, got ({self.site_a}, {self.site_b})")
        if self.site_b - self.site_a not in (1, 2):
            raise ValueError(
                f"bond range must be 1 or 2, got {self.site_b - self.site_a}"
            )


def build_bonds(spec: ChainSpec) -> list[Bond]:
    """Bond list for the requested variant; zero-strength bonds are omitted.

    initial:          impurity bonds (1,2), (1,3) weakened by j_prime.
    end_quenched:     additionally (N-1,N), (N-2,N) weakened by j_prime.
    double_quenched:  as end_quenched with the impurity bonds removed.
    uniform:          no weakening anywhere (oracle chain).
    """
    n, j1, j2, jp = spec.n_sites, spec.j1, spec.j2, spec.j_prime
    bonds: list[Bond] = []

    def add(a: int, b: int, w: float):
        if b <= n and w != 0.0:
            bonds.append(Bond(a, b, w))

    if spec.variant == "uniform":
        for i in range(1, n):
            add(i, i + 1, j1)
        for i in range(1, n - 1):
            add(i, i + 2, j2)
    elif spec.variant == "initial":
        add(1, 2, jp * j1)
        add(1, 3, jp * j2)
        for i in range(2, n):
            add(i, i + 1, j1)
        for i in range(2, n - 1):
            add(i, i + 2, j2)
    elif spec.variant == "end_quenched":
        add(1, 2, jp * j1)
        add(1, 3, jp * j2)
        add(n - 1, n, jp * j1)
        add(n - 2, n, jp * j2)
        for i in range(2, n - 1):
            add(i, i + 1, j1)
        for i in range(2, n - 2):
            add(i, i + 2, j2)
    elif spec.variant == "double_quenched":
        add(n - 1, n, jp * j1)
        add(n - 2, n, jp * j2)
        for i in range(2, n - 1):
            add(i, i + 1, j1)
        for i in range(2, n - 2):
            add(i, i + 2, j2)
    else:  # pragma: no cover - ChainSpec already validates
        raise ValueError(f"unknown variant {spec.variant!r}")
    return bonds


class HamiltonianOperator:
    """Sector-restricted Hamiltonian with matrix-free and cached-sparse modes.

    ``cache_sparse=None`` (default) caches a CSR matrix lazily whenever the
    sector dimension is below SPARSE_CACHE_MAX_DIM; pass False to force the
    memory-lean matrix-free kernel, True to force caching.
    """

    def __init__(self, spec: ChainSpec | None, basis: SectorBasis, bonds=None,
                 cache_sparse: bool | None = None):
        # spec may be None for hand-built bond lists (tiny oracle systems)
        if spec is not None and basis.n_sites != spec.n_sites:
            raise ValueError("basis and spec disagree on the number of sites")
        if bonds is None and spec is None:
            raise ValueError("either a spec or an explicit bond list is required")
        self.spec = spec
        self.basis = basis
        self.bonds = list(bonds) if bonds is not None else build_bonds(spec)
        if cache_sparse is None:
            cache_sparse = basis.dim <= SPARSE_CACHE_MAX_DIM
        self.cache_sparse = cache_sparse
        self._bits_a = np.array([b.site_a - 1 for b in self.bonds], dtype=np.int64)
        self._bits_b = np.array([b.site_b - 1 for b in self.bonds], dtype=np.int64)
        self._strengths = np.array([b.strength for b in self.bonds], dtype=np.float64)
        self._csr = None
        self._spectral = None

    @property
    def dim(self) -> int:
        return self.basis.dim

    def bond_key(self) -> tuple:
        """Hashable identity of the operator's action (for caching)."""
        return (self.basis.n_sites, self.basis.n_up,
                tuple((b.site_a, b.site_b, b.strength) for b in self.bonds))

    def apply(self, v: np.ndarray) -> np.ndarray:
        """H @ v within the sector; preserves real/complex dtype of v."""
        v = np.asarray(v)
        if v.shape != (self.dim,):
            raise ValueError(f"vector has shape {v.shape}, sector dimension is {self.dim}")
        if self.cache_sparse:
            return self._matrix() @ v
        dtype = np.complex128 if np.iscomplexobj(v) else np.float64
        out = np.zeros(self.dim, dtype=dtype)
        kernels.apply_bonds(self.basis.configs, self._bits_a, self._bits_b,
                            self._strengths, np.ascontiguousarray(v, dtype=dtype), out)
        return out

    def expectation(self, v: np.ndarray) -> float:
        return float(np.real(np.vdot(v, self.apply(v))))

    def diagonal(self) -> np.ndarray:
        configs = self.basis.configs
        diag = np.zeros(self.dim)
        for a, b, w in zip(self._bits_a, self._bits_b, self._strengths):
            parallel = ((configs >> a) & 1) == ((configs >> b) & 1)
            diag += np.where(parallel, w, -w)
        return diag

    def _matrix(self) -> sp.csr_matrix:
        if self._csr is None:
            configs = self.basis.configs
            rows, cols, vals = [], [], []
            for a, b, w in zip(self._bits_a, self._bits_b, self._strengths):
                mask = (1 << int(a)) | (1 << int(b))
                parallel = ((configs >> a) & 1) == ((configs >> b) & 1)
                src = np.flatnonzero(~parallel)
                dst = np.searchsorted(configs, configs[src] ^ mask)
                rows.append(dst)
                cols.append(src)
                vals.append(np.full(len(src), 2.0 * w))
            if rows:
                rows = np.concatenate(rows)
                cols = np.concatenate(cols)
                vals = np.concatenate(vals)
            mat = sp.coo_matrix((vals, (rows, cols)), shape=(self.dim, self.dim)).tocsr()
            mat += sp.diags(self.diagonal())
            self._csr = mat.tocsr()
        return self._csr

    def dense(self) -> np.ndarray:
        return self._matrix().toarray()


def sector_hamiltonian(spec: ChainSpec, n_up: int | None = None,
                       cache_sparse: bool | None = None) -> HamiltonianOperator:
    """Operator restricted to the n_up sector (default: the Sz=0 sector)."""
    if n_up is None:
        n_up = sector_of_ground_state(spec.n_sites)
    basis = enumerate_sector(spec.n_sites, n_up)
    return HamiltonianOperator(spec, basis, cache_sparse=cache_sparse)
