"""
Copyright (c) 2024 The pauliflow authors.

Dense ground truth: density-matrix evolution with a depolarizing layer
before the first gate layer and after every gate layer.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import torch

from . import gates as G
from .circuit import Circuit
from .paths import MAX_ORACLE_PATHS, expectation_truncated
from .pauli import Observable, PauliString, ProductState

logger = logging.getLogger(__name__)

MAX_DENSE_QUBITS = 10


@dataclass
class DensityMatrix:
    """An n-qubit density matrix stored as a (2,) * 2n tensor.

    Axis q is the row index of qubit q and axis n + q its column index;
    qubit 0 is the most significant bit of the matrix form.
    """

    tensor: torch.Tensor
    n: int

    @classmethod
    def from_product_state(cls, state: ProductState) -> "DensityMatrix":
        rho = torch.ones(1, 1, dtype=G.DTYPE)
        for rx, ry, rz in state.bloch:
            single = 0.5 * (
                G.PAULI["I"] + rx * G.PAULI["X"] + ry * G.PAULI["Y"] + rz * G.PAULI["Z"]
            )
            rho = torch.kron(rho, single)
        n = state.n
        return cls(_to_tensor(rho, n), n)

    def matrix(self) -> torch.Tensor:
        dim = 1 << self.n
        return self.tensor.reshape(dim, dim)

    def check_invariants(self, atol: float = 1e-10) -> List[str]:
        """Trace one, Hermitian, eigenvalues >= -1e-9."""
        m = self.matrix()
        issues = []
        trace = torch.trace(m)
        if abs(trace.real.item() - 1.0) > atol or abs(trace.imag.item()) > atol:
            issues.append(f"trace {trace.item()} != 1")
        if not torch.allclose(m, m.conj().T, atol=atol, rtol=0.0):
            issues.append("not Hermitian")
        else:
            low = torch.linalg.eigvalsh(m).min().item()
            if low < -1e-9:
                issues.append(f"negative eigenvalue {low}")
        return issues


def _to_tensor(m: torch.Tensor, n: int) -> torch.Tensor:
    return m.reshape((2,) * (2 * n)) if n > 0 else m.reshape(())


def _apply_left(t: torch.Tensor, u: torch.Tensor, axes: Sequence[int]) -> torch.Tensor:
    k = len(axes)
    ut = u.reshape((2,) * (2 * k))
    out = torch.tensordot(ut, t, dims=(list(range(k, 2 * k)), list(axes)))
    return torch.movedim(out, list(range(k)), list(axes))


def apply_unitary(rho: DensityMatrix, u: torch.Tensor, qubits: Sequence[int]) -> DensityMatrix:
    """rho -> U rho U^dag on `qubits` (first qubit most significant)."""
    t = _apply_left(rho.tensor, u, qubits)
    t = _apply_left(t, u.conj(), [rho.n + q for q in qubits])
    return DensityMatrix(t, rho.n)


def depolarize(rho: DensityMatrix, p: float) -> DensityMatrix:
    """Per-qubit (1 - 3p/4) rho + p/4 (X rho X + Y rho Y + Z rho Z)."""
    if p == 0.0:
        return rho
    for q in range(rho.n):
        out = (1.0 - 0.75 * p) * rho.tensor
        for letter in "XYZ":
            out = out + 0.25 * p * apply_unitary(rho, G.PAULI[letter], [q]).tensor
        rho = DensityMatrix(out, rho.n)
    return rho


def pauli_expectation(rho: DensityMatrix, string: PauliString) -> float:
    """tr(P rho)."""
    t = rho.tensor
    for q in string.support:
        t = _apply_left(t, G.PAULI[string.letter(q)], [q])
    value = torch.trace(t.reshape(1 << rho.n, 1 << rho.n))
    assert abs(value.imag.item()) < 1e-9, "Pauli expectation has an imaginary part."
    return value.real.item()


@torch.no_grad()
def exact_noisy_expectation(
    circuit: Circuit,
    state: ProductState,
    obs: Union[Observable, PauliString],
    p: float,
    check: bool = False,
) -> float:
    """tr(O rho) after T_p U_d T_p ... U_1 T_p applied to rho_0.

    Args:
        circuit: A valid circuit on at most 10 qubits.
        state: Product input state.
        obs: Observable or single Pauli string.
        p: Depolarizing rate in [0, 1].
        check: Assert the density-matrix invariants after every layer.
    """
    if circuit.n > MAX_DENSE_QUBITS:
        raise ValueError(f"{circuit.n} qubits exceed the dense limit of {MAX_DENSE_QUBITS}.")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"Noise rate p={p} is outside [0, 1].")
    if state.n != circuit.n:
        raise ValueError(f"State has {state.n} qubits, circuit has {circuit.n}.")
    circuit.check()
    if isinstance(obs, PauliString):
        obs = Observable.single(obs)

    rho = depolarize(DensityMatrix.from_product_state(state), p)
    for t, layer in enumerate(circuit.layers, start=1):
        for gate in layer:
            rho = apply_unitary(rho, gate.unitary(), circuit.qubit_indices(gate))
        rho = depolarize(rho, p)
        if check:
            issues = rho.check_invariants()
            assert not issues, f"Layer {t}: {issues}"
    return sum(a * pauli_expectation(rho, s) for a, s in obs.terms)


def exact_pauli_transfer(
    circuit: Circuit,
    obs: Union[Observable, PauliString],
    state: ProductState,
    p: float,
    max_paths: int = MAX_ORACLE_PATHS,
    threads: int = 1,
) -> float:
    """Untruncated Pauli-path sum; aborts beyond `max_paths` paths."""
    return expectation_truncated(
        circuit, obs, state, p, None, threads=threads, max_paths=max_paths
    ).value


@dataclass
class ChannelReport:
    """Action of N_p on the single-qubit Pauli basis."""

    p: float
    scales: Tuple[float, float, float]
    identity_preserved: bool
    max_deviation: float

    @property
    def passed(self) -> bool:
        return self.identity_preserved and self.max_deviation < 1e-12


def _channel(m: torch.Tensor, p: float) -> torch.Tensor:
    return depolarize(DensityMatrix(m.reshape(2, 2), 1), p).matrix()


def depolarize_channel_check(p: float) -> ChannelReport:
    """Verify N_p(I) = I and N_p(P) = (1 - p) P for P in X, Y, Z."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"Noise rate p={p} is outside [0, 1].")
    ident = G.PAULI["I"]
    identity_preserved = bool(torch.allclose(_channel(ident, p), ident, atol=1e-12, rtol=0))
    scales, deviation = [], 0.0
    for letter in "XYZ":
        pm = G.PAULI[letter]
        out = _channel(pm, p)
        scale = (torch.trace(pm @ out) / 2).real.item()
        scales.append(scale)
        deviation = max(deviation, (out - (1.0 - p) * pm).abs().max().item())
    return ChannelReport(p, tuple(scales), identity_preserved, deviation)


def depolarize_bloch(
    bloch: Tuple[float, float, float], p: float
) -> Tuple[float, float, float]:
    """Bloch vector after one application of N_p."""
    rho = depolarize(DensityMatrix.from_product_state(ProductState((tuple(bloch),))), p)
    return tuple(pauli_expectation(rho, PauliString.from_label(c)) for c in "XYZ")
