"""Chain parameterization and fixed-magnetization sector bases.

Spin configurations are stored as unsigned integers with bit i-1 holding the
spin at site i (1-based site labels, bit set = spin up).  All reduced objects
derived from a sector vector use the same little-endian convention: the
smallest retained site maps to the least significant bit of the reduced index.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Critical next-nearest-neighbor coupling separating the gapless (Kondo)
# phase from the gapped dimerised phase.
CRITICAL_J2 = 0.2412

MAX_SITES = 24

VARIANTS = ("initial", "end_quenched", "double_quenched", "uniform")


@dataclass(frozen=True)
class ChainSpec:
    """Physical parameterization of one open chain with a weakened end bond.

    ``j_prime`` multiplies the couplings that attach the impurity (site 1)
    to the chain; for the quenched variants it also weakens the bonds of
    site N.  ``j1`` is the nearest-neighbor coupling (energy unit), ``j2``
    the next-nearest-neighbor one.
    """

    n_sites: int
    j1: float = 1.0
    j2: float = 0.0
    j_prime: float = 1.0
    variant: str = "initial"

    def __post_init__(self):
        if self.n_sites % 2 != 0:
            raise ValueError(f"n_sites must be even, got {self.n_sites}")
        if not 4 <= self.n_sites <= MAX_SITES:
            raise ValueError(f"n_sites must be in [4, {MAX_SITES}], got {self.n_sites}")
        if not self.j1 > 0:
            raise ValueError(f"j1 must be positive, got {self.j1}")
        if self.j2 < 0:
            raise ValueError(f"j2 must be nonnegative, got {self.j2}")
        if not 0.0 < self.j_prime <= 1.0:
            raise ValueError(f"j_prime must be in (0, 1], got {self.j_prime}")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}, expected one of {VARIANTS}")

    @property
    def regime(self) -> str:
        """Phase classification by j2: 'kondo', 'dimer' or 'critical'."""
        if self.j2 < CRITICAL_J2:
            return "kondo"
        if self.j2 > CRITICAL_J2:
            return "dimer"
        return "critical"

    def replace(self, **changes) -> "ChainSpec":
        from dataclasses import replace

        return replace(self, **changes)


@dataclass(frozen=True)
class SectorBasis:
    """All n_sites-bit configurations with a fixed number of up spins.

    ``configs`` is sorted ascending, so positions double as ordinals and
    membership lookups reduce to binary search.
    """

    n_sites: int
    n_up: int
    configs: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.configs)

    def index_of(self, config) -> np.ndarray | np.intp:
        """Ordinal(s) of configuration(s); inverse of ``configs[k]``."""
        idx = np.searchsorted(self.configs, config)
        if np.any(self.configs[idx] != config):
            raise KeyError(f"configuration not in sector (n_up={self.n_up})")
        return idx

    def bit(self, site: int) -> np.ndarray:
        """0/1 array: spin at 1-based ``site`` for every configuration."""
        return ((self.configs >> (site - 1)) & 1).astype(np.int64)


def enumerate_sector(n_sites: int, n_up: int) -> SectorBasis:
    """Enumerate the fixed-magnetization sector, ascending as integers.

    Uses Gosper's hack to walk same-popcount integers in increasing order.
    """
    if not 0 <= n_sites <= MAX_SITES:
        raise ValueError(f"n_sites must be in [0, {MAX_SITES}], got {n_sites}")
    if not 0 <= n_up <= n_sites:
        raise ValueError(f"n_up must be in [0, {n_sites}], got {n_up}")
    if n_up == 0:
        configs = np.array([0], dtype=np.int64)
    else:
        out = np.empty(_binomial(n_sites, n_up), dtype=np.int64)
        c = (1 << n_up) - 1
        top = 1 << n_sites
        k = 0
        while c < top:
            out[k] = c
            k += 1
            lo = c & -c
            lz = c + lo
            c = lz | (((c ^ lz) // lo) >> 2)
        configs = out
    return SectorBasis(n_sites=n_sites, n_up=n_up, configs=configs)


def sector_of_ground_state(n_sites: int) -> int:
    """Up-spin count of the zero-magnetization sector hosting the ground state.

    The even-N antiferromagnetic ground state is a total singlet, so the
    relevant sector is Sz = 0.
    """
    if n_sites % 2 != 0:
        raise ValueError(f"n_sites must be even, got {n_sites}")
    return n_sites // 2


def _binomial(n: int, k: int) -> int:
    from math import comb

    return comb(n, k)


@dataclass
class PureState:
    """Normalized state vector expressed in one sector basis."""

    basis: SectorBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes)
        if self.amplitudes.shape != (self.basis.dim,):
            raise ValueError(
                f"amplitude vector has length {self.amplitudes.shape}, "
                f"sector dimension is {self.basis.dim}"
            )

    @property
    def n_sites(self) -> int:
        return self.basis.n_sites

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "PureState":
        return PureState(self.basis, self.amplitudes.copy())
