"""Backend parity: compiled kernel, numpy fallback, and cached CSR."""

import numpy as np
import pytest

from kondochain import kernels
from kondochain.basis import ChainSpec, enumerate_sector
from kondochain.hamiltonian import HamiltonianOperator, build_bonds


def _bond_arrays(bonds):
    a = np.array([b.site_a - 1 for b in bonds], dtype=np.int64)
    bb = np.array([b.site_b - 1 for b in bonds], dtype=np.int64)
    w = np.array([b.strength for b in bonds])
    return a, bb, w


@pytest.mark.parametrize("variant", ["initial", "end_quenched", "double_quenched", "uniform"])
@pytest.mark.parametrize("dtype", [np.float64, np.complex128])
def test_python_kernel_matches_selected_backend(variant, dtype):
    spec = ChainSpec(10, j2=0.37, j_prime=0.43, variant=variant)
    basis = enumerate_sector(10, 5)
    a, b, w = _bond_arrays(build_bonds(spec))
    rng = np.random.default_rng(3)
    v = rng.standard_normal(basis.dim).astype(dtype)
    if dtype is np.complex128:
        v = v + 1j * rng.standard_normal(basis.dim)
    out1 = np.zeros(basis.dim, dtype=dtype)
    out2 = np.zeros(basis.dim, dtype=dtype)
    kernels.apply_bonds(basis.configs, a, b, w, v, out1)
    kernels.apply_bonds_python(basis.configs, a, b, w, v.copy(), out2)
    np.testing.assert_allclose(out1, out2, atol=1e-13)


@pytest.mark.parametrize("dtype", [np.float64, np.complex128])
def test_matrixfree_matches_cached_sparse(dtype):
    spec = ChainSpec(10, j2=0.25, j_prime=0.6)
    basis = enumerate_sector(10, 5)
    h_free = HamiltonianOperator(spec, basis, cache_sparse=False)
    h_csr = HamiltonianOperator(spec, basis, cache_sparse=True)
    rng = np.random.default_rng(11)
    v = rng.standard_normal(basis.dim).astype(dtype)
    if dtype is np.complex128:
        v = v + 1j * rng.standard_normal(basis.dim)
    np.testing.assert_allclose(h_free.apply(v), h_csr.apply(v), atol=1e-12)


def test_kernel_accumulates_into_out():
    spec = ChainSpec(6, j_prime=0.5)
    basis = enumerate_sector(6, 3)
    a, b, w = _bond_arrays(build_bonds(spec))
    v = np.ones(basis.dim)
    seed = np.arange(basis.dim, dtype=float)
    out = seed.copy()
    kernels.apply_bonds(basis.configs, a, b, w, v, out)
    h = HamiltonianOperator(spec, basis, cache_sparse=True)
    np.testing.assert_allclose(out, seed + h.apply(v), atol=1e-13)


def test_backend_reports_a_name():
    assert kernels.BACKEND in ("cython", "python")
