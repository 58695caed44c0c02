"""Unitary quench dynamics and thermal-state machinery.

Pure states are propagated with an adaptive short-step Lanczos exponential
integrator (subspace <= 30 vectors, step halving on failure).  Thermal
objects live in spectral form; their retained eigenvectors are propagated
through the cached eigendecomposition of the final Hamiltonian, which is
exact and reusable across times and temperatures.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh, eigh_tridiagonal

from .basis import ChainSpec, PureState, SectorBasis
from .eigensolver import DEFAULT_SEED, FULL_SPECTRUM_MAX_DIM, full_spectrum, ground_state
from .hamiltonian import HamiltonianOperator, sector_hamiltonian
from .reduced_density import ReducedDensity, reduce, two_site_batch
from .measures import concurrence_value

KRYLOV_TOL = 1e-12
KRYLOV_MAX_VECS = 30
THERMAL_WEIGHT_CUTOFF = 1e-8


class PropagationError(RuntimeError):
    """Krylov step size underflowed without meeting the error target."""


def _krylov_step(h: HamiltonianOperator, v: np.ndarray, dt: float, tol: float,
                 m_max: int):
    """Attempt u = exp(-i dt H) v; returns (u, err_estimate) or (None, err)."""
    beta0 = np.linalg.norm(v)
    if beta0 == 0.0:
        return v.copy(), 0.0
    dim = len(v)
    m_max = min(m_max, dim)
    V = np.empty((m_max, dim), dtype=complex)
    V[0] = v / beta0
    alpha: list[float] = []
    beta: list[float] = []
    err = np.inf
    for j in range(m_max):
        w = h.apply(V[j])
        a = float(np.real(np.vdot(V[j], w)))
        alpha.append(a)
        w = w - a * V[j]
        if j > 0:
            w -= beta[j - 1] * V[j - 1]
        Vj = V[: j + 1]
        w -= Vj.T @ (Vj.conj() @ w)  # full reorthogonalization
        w -= Vj.T @ (Vj.conj() @ w)
        b = float(np.linalg.norm(w))
        vals, Z = eigh_tridiagonal(alpha, beta)
        y = Z @ (np.exp(-1j * dt * vals) * Z[0])
        err = b * abs(dt) * abs(y[j])
        if err <= tol or b < 1e-14:
            return beta0 * (V[: j + 1].T @ y), err
        if j + 1 < m_max:
            beta.append(b)
            V[j + 1] = w / b
    return None, err


def evolve(state: PureState, h: HamiltonianOperator, t: float,
           tol: float = KRYLOV_TOL, m_max: int = KRYLOV_MAX_VECS) -> PureState:
    """exp(-i t H) |state>, adaptive step control at local error ``tol``.

    Negative t is permitted (used by the time-reversal diagnostics).
    """
    if state.basis.dim != h.dim:
        raise ValueError("state and operator live in different sectors")
    v = state.amplitudes.astype(complex)
    if t == 0.0:
        return PureState(state.basis, v)
    scale = abs(t)
    done = 0.0
    dt = t
    while abs(t - done) > 1e-15 * scale:
        remaining = t - done
        if abs(dt) > abs(remaining):
            dt = remaining
        u, err = _krylov_step(h, v, dt, tol, m_max)
        if u is None:
            dt *= 0.5
            if abs(dt) < 1e-12 * max(1.0, scale):
                raise PropagationError(
                    f"step underflow at t={done:g} (target {t:g}, error estimate {err:.2e})"
                )
            continue
        v = u
        done += dt
        dt *= 2.0
    return PureState(state.basis, v)


@dataclass
class QuenchTrajectory:
    """Sampled end-pair concurrence after a single (or double) bond quench."""

    spec_initial: ChainSpec
    spec_final: ChainSpec
    times: np.ndarray
    concurrences: np.ndarray
    diagnostics: dict = field(default_factory=dict)


def run_quench(spec: ChainSpec, t_max: float | None = None, dt: float | None = None,
               final_variant: str = "end_quenched", seed: int = DEFAULT_SEED,
               tol: float = KRYLOV_TOL, reversal_check: bool = False) -> QuenchTrajectory:
    """Evolve the ground state of ``spec`` under the quenched Hamiltonian.

    Samples the concurrence of the (1, N) reduced state on the grid
    {0, dt, ..., t_max}; defaults t_max = 4N and dt = t_max/400.
    """
    if spec.variant != "initial":
        raise ValueError("run_quench starts from the ground state of the 'initial' variant")
    if final_variant not in ("end_quenched", "double_quenched"):
        raise ValueError(f"final variant must be a quenched one, got {final_variant!r}")
    n = spec.n_sites
    if t_max is None:
        t_max = 4.0 * n
    if dt is None:
        dt = t_max / 400.0
    if t_max <= 0 or dt <= 0:
        raise ValueError("t_max and dt must be positive")

    h_i = sector_hamiltonian(spec)
    gs = ground_state(h_i, seed=seed)
    spec_f = spec.replace(variant=final_variant)
    h_f = HamiltonianOperator(spec_f, h_i.basis)

    n_steps = int(round(t_max / dt))
    times = dt * np.arange(n_steps + 1)
    cs = np.empty(n_steps + 1)
    psi = PureState(h_i.basis, gs.vector.astype(complex))
    e_ref = h_f.expectation(psi.amplitudes)
    norm_drift = 0.0
    energy_drift = 0.0
    cs[0] = _end_pair_concurrence(psi)
    for k in range(1, n_steps + 1):
        psi = evolve(psi, h_f, dt, tol=tol)
        cs[k] = _end_pair_concurrence(psi)
        norm_drift = max(norm_drift, abs(psi.norm() - 1.0))
        energy_drift = max(energy_drift,
                           abs(h_f.expectation(psi.amplitudes) - e_ref) / abs(e_ref))
    diagnostics = {
        "seed": seed,
        "krylov_tol": tol,
        "energy_reference": e_ref,
        "norm_drift": norm_drift,
        "energy_drift_rel": energy_drift,
    }
    if reversal_check:
        back = evolve(psi, h_f, -t_max, tol=tol)
        diagnostics["reversal_fidelity"] = float(
            abs(np.vdot(gs.vector.astype(complex), back.amplitudes))
        )
    return QuenchTrajectory(spec, spec_f, times, cs, diagnostics)


def _end_pair_concurrence(state: PureState) -> float:
    n = state.basis.n_sites
    return concurrence_value(reduce(state, [1, n]).matrix)


# --------------------------------------------------------------------------
# thermal machinery


@dataclass
class MixedState:
    """Spectral form of a thermal state within one magnetization sector."""

    basis: SectorBasis
    energies: np.ndarray
    vectors: np.ndarray  # (dim, n_retained) columns
    weights: np.ndarray  # sums to 1 after truncation
    beta: float
    log_partition: float


@dataclass
class ThermalEnsemble:
    """Full-space thermal state assembled sector-by-sector."""

    blocks: list  # (MixedState, sector_weight)
    beta: float
    log_partition: float


def thermal_state(h: HamiltonianOperator, beta: float) -> MixedState:
    """Boltzmann-weighted spectral form, truncated at relative weight 1e-8."""
    if beta < 0:
        raise ValueError(f"beta must be nonnegative, got {beta}")
    pairs = full_spectrum(h)
    energies = np.array([p.value for p in pairs])
    vectors = np.column_stack([p.vector for p in pairs])
    rel = np.exp(-beta * (energies - energies[0]))
    z_shifted = rel.sum()
    keep = np.flatnonzero(rel > THERMAL_WEIGHT_CUTOFF * rel.max())
    weights = rel[keep] / rel[keep].sum()
    return MixedState(
        basis=h.basis,
        energies=energies[keep],
        vectors=vectors[:, keep],
        weights=weights,
        beta=beta,
        log_partition=float(-beta * energies[0] + np.log(z_shifted)),
    )


def sector_family(spec: ChainSpec, sz0_only: bool = False) -> list[HamiltonianOperator]:
    """One sector operator per magnetization (or just Sz=0)."""
    if sz0_only:
        return [sector_hamiltonian(spec)]
    return [sector_hamiltonian(spec, n_up=k) for k in range(spec.n_sites + 1)]


def thermal_ensemble(hs: list[HamiltonianOperator], beta: float) -> ThermalEnsemble:
    """Combine per-sector thermal states with their Boltzmann sector weights."""
    states = [thermal_state(h, beta) for h in hs]
    e_min = min(ms.energies.min() for ms in states)
    shifted = np.array([np.exp(ms.log_partition + beta * e_min) for ms in states])
    sector_weights = shifted / shifted.sum()
    log_z = float(-beta * e_min + np.log(shifted.sum()))
    return ThermalEnsemble(
        blocks=list(zip(states, sector_weights)), beta=beta, log_partition=log_z
    )


def spectral_decomposition(h: HamiltonianOperator):
    """Cached dense eigendecomposition used by the exact thermal propagator."""
    if h._spectral is None:
        if h.dim > FULL_SPECTRUM_MAX_DIM:
            raise ValueError(
                f"sector dimension {h.dim} too large for the spectral propagator"
            )
        h._spectral = eigh(h.dense())
    return h._spectral


def evolve_mixed(ms: MixedState, h_final: HamiltonianOperator, t: float) -> ReducedDensity:
    """Propagate each retained eigenvector under ``h_final`` for time ``t``
    and accumulate the weighted reduced matrix of the end pair (1, N)."""
    if h_final.basis.dim != ms.basis.dim:
        raise ValueError("mixed state and final Hamiltonian live in different sectors")
    vals, vecs = spectral_decomposition(h_final)
    coeff = vecs.T @ ms.vectors
    psi_t = vecs @ (np.exp(-1j * vals * t)[:, None] * coeff)
    n = ms.basis.n_sites
    mat = two_site_batch(ms.basis, psi_t, ms.weights, 1, n)
    return ReducedDensity(sites=(1, n), matrix=mat)


def ensemble_end_pair(ensemble: ThermalEnsemble, h_finals: list[HamiltonianOperator],
                      t: float) -> ReducedDensity:
    """Sector-weighted end-pair reduced matrix of the evolved ensemble."""
    by_nup = {h.basis.n_up: h for h in h_finals}
    mat = np.zeros((4, 4), dtype=complex)
    n = None
    for ms, w in ensemble.blocks:
        n = ms.basis.n_sites
        if w == 0.0:
            continue
        mat += w * evolve_mixed(ms, by_nup[ms.basis.n_up], t).matrix
    return ReducedDensity(sites=(1, n), matrix=mat)
