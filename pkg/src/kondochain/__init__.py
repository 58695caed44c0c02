"""Exact-diagonalization laboratory for impurity-block entanglement and
quench dynamics in Kondo spin chains."""

__version__ = "0.1.0"

from .basis import (
    CRITICAL_J2,
    ChainSpec,
    PureState,
    SectorBasis,
    enumerate_sector,
    sector_of_ground_state,
)
from .eigensolver import EigenPair, full_spectrum, ground_state, lowest_k
from .evolution import (
    MixedState,
    QuenchTrajectory,
    ThermalEnsemble,
    evolve,
    evolve_mixed,
    run_quench,
    thermal_ensemble,
    thermal_state,
)
from .hamiltonian import Bond, HamiltonianOperator, build_bonds, sector_hamiltonian
from .measures import (
    MeasureResult,
    concurrence,
    impurity_block_negativity,
    negativity,
    purity,
    von_neumann_entropy,
)
from .reduced_density import ReducedDensity, SchmidtData, reduce, schmidt

__all__ = [
    "CRITICAL_J2",
    "Bond",
    "ChainSpec",
    "EigenPair",
    "HamiltonianOperator",
    "MeasureResult",
    "MixedState",
    "PureState",
    "QuenchTrajectory",
    "ReducedDensity",
    "SchmidtData",
    "SectorBasis",
    "ThermalEnsemble",
    "build_bonds",
    "concurrence",
    "enumerate_sector",
    "evolve",
    "evolve_mixed",
    "full_spectrum",
    "ground_state",
    "impurity_block_negativity",
    "lowest_k",
    "negativity",
    "purity",
    "reduce",
    "run_quench",
    "schmidt",
    "sector_hamiltonian",
    "sector_of_ground_state",
    "thermal_ensemble",
    "thermal_state",
    "von_neumann_entropy",
]
