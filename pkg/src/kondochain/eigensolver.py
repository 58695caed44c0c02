"""Ground states, low excitations and full sector spectra.

Iterative path: Lanczos with full (two-pass) reorthogonalization, Krylov
blocks of up to 200 vectors and restarts; excited states come from Lanczos
on the deflated operator (converged pairs projected out).  Small sectors
are diagonalized densely, full spectra always are.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh, eigh_tridiagonal

from .basis import PureState
from .hamiltonian import HamiltonianOperator

DEFAULT_SEED = 1817
LANCZOS_TOL = 1e-10
MAX_KRYLOV = 200
MAX_RESTARTS = 12
DENSE_EIG_CUTOFF = 1024
FULL_SPECTRUM_MAX_DIM = 5000
DEGENERACY_GAP = 1e-10


class EigensolverError(RuntimeError):
    """Raised when Lanczos fails to reach the residual tolerance."""


class DegenerateSpectrumWarning(UserWarning):
    """Two lowest eigenvalues closer than the degeneracy guard."""


@dataclass
class EigenPair:
    value: float
    vector: np.ndarray

    def state(self, basis) -> PureState:
        return PureState(basis, self.vector)


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude amplitude real positive (deterministic)."""
    k = int(np.argmax(np.abs(vec)))
    pivot = vec[k]
    if np.iscomplexobj(vec):
        phase = pivot / abs(pivot)
        return vec * np.conj(phase)
    return -vec if pivot < 0 else vec


def _check_degeneracy(values):
    if len(values) >= 2 and abs(values[1] - values[0]) < DEGENERACY_GAP:
        warnings.warn(
            f"two lowest eigenvalues nearly degenerate "
            f"(gap {abs(values[1] - values[0]):.2e})",
            DegenerateSpectrumWarning,
            stacklevel=3,
        )


def _lanczos_lowest(h: HamiltonianOperator, deflate: np.ndarray, seed: int,
                    tol: float = LANCZOS_TOL):
    """Lowest eigenpair of H restricted to the complement of ``deflate``.

    Returns (value, vector, next_ritz_value); the third entry feeds the
    degeneracy guard without a second full solve.
    """
    dim = h.dim
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(dim)

    def project_out(w):
        if deflate.shape[1]:
            w -= deflate @ (deflate.T @ w)
            w -= deflate @ (deflate.T @ w)
        return w

    v = project_out(v)
    nrm = np.linalg.norm(v)
    if nrm < 1e-12:
        raise EigensolverError("start vector vanished after deflation")
    v /= nrm

    for _restart in range(MAX_RESTARTS):
        V = np.empty((MAX_KRYLOV, dim))
        alpha: list[float] = []
        beta: list[float] = []
        V[0] = v
        theta2 = None
        for j in range(MAX_KRYLOV):
            w = h.apply(V[j])
            a = float(V[j] @ w)
            alpha.append(a)
            w = w - a * V[j]
            if j > 0:
                w -= beta[j - 1] * V[j - 1]
            # full reorthogonalization, two passes
            Vj = V[: j + 1]
            w -= Vj.T @ (Vj @ w)
            w -= Vj.T @ (Vj @ w)
            w = project_out(w)
            b = float(np.linalg.norm(w))

            select = (0, min(1, j))
            vals, y = eigh_tridiagonal(alpha, beta, select="i", select_range=select)
            theta = vals[0]
            theta2 = vals[1] if len(vals) > 1 else None
            resid_est = b * abs(y[j, 0])
            breakdown = b < 1e-13
            if resid_est <= tol * max(1.0, abs(theta)) or breakdown:
                x = V[: j + 1].T @ y[:, 0]
                x = project_out(x)
                x /= np.linalg.norm(x)
                resid = np.linalg.norm(h.apply(x) - theta * x)
                if resid <= 100 * tol * max(1.0, abs(theta)) or breakdown:
                    return theta, x, theta2
                # fall through to restart from the current Ritz vector
                v = x
                break
            if j == MAX_KRYLOV - 1:
                x = V.T @ y[:, 0]
                x = project_out(x)
                x /= np.linalg.norm(x)
                v = x
                break
            beta.append(b)
            V[j + 1] = w / b
    raise EigensolverError(
        f"Lanczos did not converge (dim={dim}, tol={tol}, "
        f"restarts={MAX_RESTARTS}, block={MAX_KRYLOV})"
    )


def lowest_k(h: HamiltonianOperator, k: int, seed: int = DEFAULT_SEED) -> list[EigenPair]:
    """k lowest eigenpairs, ascending, pairwise orthogonal."""
    if not 1 <= k <= 40:
        raise ValueError(f"k must be in [1, 40], got {k}")
    if k > h.dim:
        raise ValueError(f"k={k} exceeds the sector dimension {h.dim}")
    if h.dim <= DENSE_EIG_CUTOFF:
        vals, vecs = eigh(h.dense())
        pairs = [EigenPair(float(vals[i]), _fix_phase(vecs[:, i])) for i in range(min(k, h.dim))]
        _check_degeneracy(vals)
        return pairs
    pairs: list[EigenPair] = []
    deflate = np.empty((h.dim, 0))
    for i in range(k):
        theta, x, theta2 = _lanczos_lowest(h, deflate, seed + i)
        pairs.append(EigenPair(theta, _fix_phase(x)))
        deflate = np.column_stack([deflate, x])
        if i == 0 and theta2 is not None and abs(theta2 - theta) < DEGENERACY_GAP:
            warnings.warn(
                f"two lowest eigenvalues nearly degenerate (gap {abs(theta2 - theta):.2e})",
                DegenerateSpectrumWarning,
                stacklevel=2,
            )
    return pairs


def ground_state(h: HamiltonianOperator, seed: int = DEFAULT_SEED) -> EigenPair:
    """Lowest eigenpair of the sector; phase fixed, deterministic for a seed."""
    if h.dim == 1:
        return EigenPair(float(h.diagonal()[0]), np.ones(1))
    return lowest_k(h, 1, seed=seed)[0]


def full_spectrum(h: HamiltonianOperator) -> list[EigenPair]:
    """Complete orthonormal eigenbasis of the sector (dense path)."""
    if h.dim > FULL_SPECTRUM_MAX_DIM:
        raise ValueError(
            f"sector dimension {h.dim} exceeds full-spectrum cap {FULL_SPECTRUM_MAX_DIM}"
        )
    vals, vecs = eigh(h.dense())
    _check_degeneracy(vals)
    return [EigenPair(float(vals[i]), _fix_phase(vecs[:, i])) for i in range(h.dim)]
