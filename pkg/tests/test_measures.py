import numpy as np
import pytest

from kondochain.basis import ChainSpec, PureState, enumerate_sector
from kondochain.eigensolver import ground_state
from kondochain.hamiltonian import sector_hamiltonian
from kondochain.measures import (
    concurrence,
    concurrence_value,
    impurity_block_negativity,
    negativity,
    purity,
    von_neumann_entropy,
)
from kondochain.reduced_density import ReducedDensity, reduce

from oracles import embed_sector, negativity_dense, partial_trace_vec


def bell_rho():
    # singlet on two qubits, little-endian (|01> - |10>)/sqrt(2)
    psi = np.array([0.0, 1.0, -1.0, 0.0]) / np.sqrt(2)
    return ReducedDensity(sites=(1, 2), matrix=np.outer(psi, psi))


def werner_rho(p):
    return ReducedDensity(sites=(1, 2), matrix=p * bell_rho().matrix + (1 - p) * np.eye(4) / 4)


def product_rho():
    psi = np.zeros(4)
    psi[1] = 1.0
    return ReducedDensity(sites=(1, 2), matrix=np.outer(psi, psi))


class TestNegativity:
    def test_bell_state(self):
        assert negativity(bell_rho(), [1]).value == pytest.approx(1.0, abs=1e-10)

    def test_product_state(self):
        assert negativity(product_rho(), [1]).value == 0.0

    def test_werner_analytic(self):
        # partial-transpose spectrum (1+p)/4 x3, (1-3p)/4: E = (3p-1)/2
        for p in (0.5, 0.8, 0.9):
            want = (3 * p - 1) / 2
            assert negativity(werner_rho(p), [2]).value == pytest.approx(want, abs=1e-10)

    def test_transpose_subset_validation(self):
        with pytest.raises(ValueError):
            negativity(bell_rho(), [])
        with pytest.raises(ValueError):
            negativity(bell_rho(), [1, 2])
        with pytest.raises(ValueError):
            negativity(bell_rho(), [3])

    def test_symmetric_under_complement(self):
        spec = ChainSpec(8, j2=0.2, j_prime=0.6)
        h = sector_hamiltonian(spec)
        rho = reduce(ground_state(h).state(h.basis), [1, 3, 6, 8])
        a = negativity(rho, [1]).value
        b = negativity(rho, [3, 6, 8]).value
        assert a == pytest.approx(b, abs=1e-10)

    def test_matches_dense_oracle(self):
        rng = np.random.default_rng(23)
        basis = enumerate_sector(8, 4)
        amps = rng.standard_normal(basis.dim)
        amps /= np.linalg.norm(amps)
        state = PureState(basis, amps)
        keep = [1, 4, 7, 8]
        rho = reduce(state, keep)
        full = embed_sector(basis.configs, amps, 8)
        rho_oracle = partial_trace_vec(full, 8, keep)
        for subset, positions in ([[1], [0]], [[4, 7], [1, 2]]):
            got = negativity(rho, subset).value
            want = negativity_dense(rho_oracle, 4, positions)
            assert got == pytest.approx(want, abs=1e-10)


class TestConcurrence:
    def test_singlet(self):
        assert concurrence(bell_rho()).value == pytest.approx(1.0, abs=1e-12)

    def test_maximally_mixed(self):
        rho = ReducedDensity(sites=(1, 2), matrix=np.eye(4) / 4)
        assert concurrence(rho).value == 0.0

    def test_werner_analytic(self):
        # C = max(0, (3p-1)/2)
        for p in (0.2, 0.5, 0.8, 0.9):
            want = max(0.0, (3 * p - 1) / 2)
            assert concurrence(werner_rho(p)).value == pytest.approx(want, abs=1e-10)

    def test_rejects_non_two_qubit(self):
        with pytest.raises(ValueError):
            concurrence(ReducedDensity(sites=(1,), matrix=np.eye(2) / 2))

    def test_equals_negativity_on_random_pure_two_qubit_states(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            psi = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            psi /= np.linalg.norm(psi)
            rho = ReducedDensity(sites=(1, 2), matrix=np.outer(psi, psi.conj()))
            assert concurrence(rho).value == pytest.approx(
                negativity(rho, [1]).value, abs=1e-10
            )


class TestEntropyAndPurity:
    def test_pure_state_zero_entropy(self):
        assert von_neumann_entropy(product_rho()).value == pytest.approx(0.0, abs=1e-12)

    def test_maximally_mixed_qubit(self):
        rho = ReducedDensity(sites=(1,), matrix=np.eye(2) / 2)
        assert von_neumann_entropy(rho).value == pytest.approx(1.0, abs=1e-12)
        assert purity(rho).value == pytest.approx(0.5, abs=1e-12)

    def test_kondo_far_block_entropy_nonzero(self):
        spec = ChainSpec(10, j2=0.0, j_prime=0.5)
        h = sector_hamiltonian(spec)
        state = ground_state(h).state(h.basis)
        # block B beyond the healing length still carries entropy
        s = von_neumann_entropy(reduce(state, list(range(6, 11)))).value
        assert s > 0.1


class TestImpurityBlockNegativity:
    def test_l0_is_maximal_for_ground_states(self):
        for j2 in (0.0, 0.42):
            spec = ChainSpec(8, j2=j2, j_prime=0.6)
            h = sector_hamiltonian(spec)
            state = ground_state(h).state(h.basis)
            val = impurity_block_negativity(state, spec, 0).value
            assert val == pytest.approx(1.0, abs=1e-6)

    def test_majumdar_ghosh_l1_vanishes(self):
        spec = ChainSpec(8, j2=0.5, j_prime=1.0)
        h = sector_hamiltonian(spec)
        state = ground_state(h).state(h.basis)
        assert impurity_block_negativity(state, spec, 1).value <= 1e-9

    @pytest.mark.parametrize("L", range(0, 11))
    def test_lowrank_matches_dense_n12(self, L):
        spec = ChainSpec(12, j2=0.0, j_prime=0.5)
        h = sector_hamiltonian(spec)
        state = ground_state(h).state(h.basis)
        lo = impurity_block_negativity(state, spec, L, method="lowrank").value
        de = impurity_block_negativity(state, spec, L, method="dense").value
        assert lo == pytest.approx(de, abs=1e-9)

    def test_lowrank_matches_dense_complex_state(self):
        # evolved states are complex; the low-rank path must stay exact
        from kondochain.evolution import evolve
        from kondochain.hamiltonian import HamiltonianOperator

        spec = ChainSpec(8, j2=0.0, j_prime=0.4)
        h = sector_hamiltonian(spec)
        hf = HamiltonianOperator(spec.replace(variant="end_quenched"), h.basis)
        psi = evolve(ground_state(h).state(h.basis), hf, 3.0)
        for L in (0, 2, 4):
            lo = impurity_block_negativity(psi, spec, L, method="lowrank").value
            de = impurity_block_negativity(psi, spec, L, method="dense").value
            assert lo == pytest.approx(de, abs=1e-9)

    def test_monotone_decrease_with_block_length(self):
        for n, j2, jp in [(8, 0.0, 0.5), (10, 0.0, 0.8), (10, 0.42, 0.5), (12, 0.3, 0.6)]:
            spec = ChainSpec(n, j2=j2, j_prime=jp)
            h = sector_hamiltonian(spec)
            state = ground_state(h).state(h.basis)
            curve = [impurity_block_negativity(state, spec, L).value
                     for L in range(0, n - 1)]
            diffs = np.diff(curve)
            assert np.all(diffs <= 1e-9)

    def test_block_length_validation(self):
        spec = ChainSpec(8)
        h = sector_hamiltonian(spec)
        state = ground_state(h).state(h.basis)
        with pytest.raises(ValueError):
            impurity_block_negativity(state, spec, -1)
        with pytest.raises(ValueError):
            impurity_block_negativity(state, spec, 7)
