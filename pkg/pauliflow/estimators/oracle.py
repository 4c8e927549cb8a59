from typing import Union

from ..circuit import Circuit
from ..oracle import MAX_DENSE_QUBITS, exact_noisy_expectation, exact_pauli_transfer
from ..paths import MAX_ORACLE_PATHS
from ..pauli import Observable, PauliString, ProductState
from .base import AbstractEstimator


class DensityMatrixEstimator(AbstractEstimator):
    """Dense density-matrix evolution; at most 10 qubits."""

    name = "density-matrix"

    def __init__(self, check: bool = False) -> None:
        self.check = check

    def estimate(
        self,
        circuit: Circuit,
        obs: Union[Observable, PauliString],
        state: ProductState,
        p: float,
    ) -> float:
        return exact_noisy_expectation(circuit, state, obs, p, check=self.check)


class PauliTransferEstimator(AbstractEstimator):
    """Untruncated Pauli-path sum with a hard path budget."""

    name = "pauli-transfer"

    def __init__(self, max_paths: int = MAX_ORACLE_PATHS, threads: int = 1) -> None:
        self.max_paths = max_paths
        self.threads = threads

    def estimate(
        self,
        circuit: Circuit,
        obs: Union[Observable, PauliString],
        state: ProductState,
        p: float,
    ) -> float:
        return exact_pauli_transfer(
            circuit, obs, state, p, max_paths=self.max_paths, threads=self.threads
        )


def oracle_for(circuit: Circuit, threads: int = 1) -> AbstractEstimator:
    """Dense oracle when it fits, the untruncated path sum otherwise."""
    if circuit.n <= MAX_DENSE_QUBITS:
        return DensityMatrixEstimator()
    return PauliTransferEstimator(threads=threads)
