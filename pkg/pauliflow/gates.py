"""
Copyright (c) 2024 The pauliflow authors.

Dense gate matrices and Pauli transfer tables.
"""
import functools
import itertools
import math
from typing import Dict, List, Tuple

import torch

DTYPE = torch.complex128

UNITARY_ATOL = 1e-10
IMAG_ATOL = 1e-10
ZERO_COEFF = 1e-12

TransferTable = Dict[str, List[Tuple[str, float]]]


def _m(rows) -> torch.Tensor:
    return torch.tensor(rows, dtype=DTYPE)


_s = 1.0 / math.sqrt(2.0)
_w = complex(math.cos(math.pi / 4), math.sin(math.pi / 4))

PAULI = {
    "I": _m([[1, 0], [0, 1]]),
    "X": _m([[0, 1], [1, 0]]),
    "Y": _m([[0, -1j], [1j, 0]]),
    "Z": _m([[1, 0], [0, -1]]),
}

NAMED = {
    "H": _m([[_s, _s], [_s, -_s]]),
    "S": _m([[1, 0], [0, 1j]]),
    "Sdg": _m([[1, 0], [0, -1j]]),
    "X": PAULI["X"],
    "Y": PAULI["Y"],
    "Z": PAULI["Z"],
    "T": _m([[1, 0], [0, _w]]),
    "Tdg": _m([[1, 0], [0, _w.conjugate()]]),
    # control is the most significant qubit
    "CNOT": _m([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]),
    "CZ": _m([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, -1]]),
    "SWAP": _m([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]),
}


def rz(theta: float) -> torch.Tensor:
    """exp(-i theta Z / 2)."""
    return _m(
        [
            [complex(math.cos(theta / 2), -math.sin(theta / 2)), 0],
            [0, complex(math.cos(theta / 2), math.sin(theta / 2))],
        ]
    )


def rx(theta: float) -> torch.Tensor:
    """exp(-i theta X / 2)."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return _m([[c, -1j * s], [-1j * s, c]])


def num_qubits(matrix: torch.Tensor) -> int:
    dim = matrix.shape[0]
    d = int(round(math.log2(dim))) if dim > 0 else -1
    if matrix.dim() != 2 or matrix.shape[1] != dim or d < 1 or (1 << d) != dim:
        raise ValueError(f"Gate matrix must be 2^D x 2^D, got {tuple(matrix.shape)}.")
    return d


def is_unitary(matrix: torch.Tensor, atol: float = UNITARY_ATOL) -> bool:
    m = matrix.to(DTYPE)
    eye = torch.eye(m.shape[0], dtype=DTYPE)
    return bool(torch.allclose(m.conj().T @ m, eye, atol=atol, rtol=0.0))


@functools.lru_cache(maxsize=None)
def pauli_basis(d: int) -> Tuple[Tuple[str, ...], torch.Tensor]:
    """All 4^d local Pauli labels and their matrices, first letter on top."""
    labels = tuple("".join(t) for t in itertools.product("IXYZ", repeat=d))
    mats = []
    for label in labels:
        m = PAULI[label[0]]
        for c in label[1:]:
            m = torch.kron(m, PAULI[c])
        mats.append(m)
    return labels, torch.stack(mats)


def transfer_table(matrix: torch.Tensor) -> TransferTable:
    """Pauli transfer table of U: for each local input P, the list of
    (P', c) with c = tr(P' U^dag P U) / 2^D and |c| >= 1e-12.
    """
    m = matrix.detach().to(DTYPE).contiguous()
    key = (tuple(m.shape), tuple(torch.view_as_real(m).flatten().tolist()))
    return _transfer_table(key)


@functools.lru_cache(maxsize=256)
def _transfer_table(key) -> TransferTable:
    shape, flat = key
    m = torch.view_as_complex(
        torch.tensor(flat, dtype=torch.float64).reshape(*shape, 2)
    )
    d = num_qubits(m)
    if d > 3:
        raise ValueError(f"Generic gates act on at most 3 qubits, got {d}.")
    if not is_unitary(m):
        raise ValueError("Gate matrix is not unitary within 1e-10.")
    labels, basis = pauli_basis(d)
    # conj[a] = U^dag P_a U; coeff[a, b] = tr(P_b conj[a]) / 2^d
    conj = m.conj().T.unsqueeze(0) @ basis @ m.unsqueeze(0)
    coeff = torch.einsum("bij,aji->ab", basis, conj) / (1 << d)
    if coeff.imag.abs().max().item() > IMAG_ATOL:
        raise ValueError("Transfer amplitude has an imaginary residue above 1e-10.")
    real = coeff.real
    table: TransferTable = {}
    for a, label in enumerate(labels):
        row = real[a]
        nz = torch.nonzero(row.abs() >= ZERO_COEFF).flatten().tolist()
        table[label] = [(labels[b], row[b].item()) for b in nz]
    return table


def is_clifford(matrix: torch.Tensor) -> bool:
    """True iff U maps every Pauli to a single signed Pauli."""
    table = transfer_table(matrix)
    return all(
        len(out) == 1 and abs(abs(out[0][1]) - 1.0) < 1e-9 for out in table.values()
    )
