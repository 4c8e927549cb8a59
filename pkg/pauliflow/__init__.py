"""
Copyright (c) 2024 The pauliflow authors.
"""

from .accumulate import ExactSum
from .circuit import Circuit, Gate, load_circuit, t_census, validate
from .counterexample import (
    counterexample_circuit,
    mixed_observable,
    mixed_observable_error,
    truncation_error,
    verify_properties,
)
from .dispatch import DispatchReport, dispatch_ground_energy
from .ensembles import brickwork_architecture, random_clifford_t_circuit, sample_random_model
from .estimators import (
    DensityMatrixEstimator,
    PauliTransferEstimator,
    TruncatedPathEstimator,
    oracle_for,
)
from .ising import (
    IsingModel,
    approx_ground_energy,
    energy_observable,
    exact_ground_energy,
    grid_model,
)
from .oracle import exact_noisy_expectation, exact_pauli_transfer
from .paths import (
    BranchExplosionError,
    PathStats,
    ThresholdError,
    accumulate_fw,
    choose_cutoff,
    choose_cutoff_random,
    count_paths,
    enumerate_paths,
    expectation_truncated,
    random_model_statistics,
    sparse_threshold,
)
from .pauli import Observable, PauliString, ProductState, weight
from .polynomial import (
    WeightPolynomial,
    evaluate,
    find_roots,
    fragility_certificate,
    l2_norm,
    root_radius_bound,
)
from .qaoa import build_qaoa, linear_swap_network, native_embedding, qaoa_sparseness_bound
from .sparseness import check_sparseness, verify_witness
from .version import __version__

__all__ = [
    "__version__",
    "PauliString",
    "Observable",
    "ProductState",
    "weight",
    "Gate",
    "Circuit",
    "validate",
    "t_census",
    "load_circuit",
    "ExactSum",
    "WeightPolynomial",
    "evaluate",
    "l2_norm",
    "find_roots",
    "root_radius_bound",
    "fragility_certificate",
    "PathStats",
    "BranchExplosionError",
    "ThresholdError",
    "enumerate_paths",
    "accumulate_fw",
    "count_paths",
    "expectation_truncated",
    "sparse_threshold",
    "choose_cutoff",
    "choose_cutoff_random",
    "random_model_statistics",
    "check_sparseness",
    "verify_witness",
    "brickwork_architecture",
    "sample_random_model",
    "random_clifford_t_circuit",
    "IsingModel",
    "grid_model",
    "exact_ground_energy",
    "approx_ground_energy",
    "energy_observable",
    "build_qaoa",
    "native_embedding",
    "linear_swap_network",
    "qaoa_sparseness_bound",
    "DispatchReport",
    "dispatch_ground_energy",
    "exact_noisy_expectation",
    "exact_pauli_transfer",
    "counterexample_circuit",
    "mixed_observable",
    "mixed_observable_error",
    "truncation_error",
    "verify_properties",
    "TruncatedPathEstimator",
    "DensityMatrixEstimator",
    "PauliTransferEstimator",
    "oracle_for",
]
