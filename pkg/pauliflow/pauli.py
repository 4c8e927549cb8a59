"""
Copyright (c) 2024 The pauliflow authors.

Bit-packed Pauli strings and the Heisenberg conjugation rules U^dag P U.
"""
import math
import re
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import torch

from .gates import transfer_table

LETTERS = "IXYZ"
# letter -> (x bit, z bit)
_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}

CLIFFORD_1Q = ("H", "S", "Sdg", "X", "Y", "Z")
CLIFFORD_2Q = ("CNOT", "CZ", "SWAP")

ZERO_COEFF = 1e-12


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True)
class PauliString:
    """An n-qubit Pauli string packed into two bitmasks.

    Bit q of `x_mask` / `z_mask` encodes the letter on qubit q as
    I=00, X=10, Y=11, Z=01 (x bit first).

    Args:
        n: Number of qubits.
        x_mask: X-part bitmask.
        z_mask: Z-part bitmask.

    Examples:

    .. code-block:: python

        >>> p = PauliString.from_label("XIZ")
        >>> p.weight
        2
        >>> p.letter(2)
        'Z'

    """

    n: int
    x_mask: int = 0
    z_mask: int = 0

    def __post_init__(self):
        assert self.n >= 0, f"Invalid qubit count {self.n}."
        limit = 1 << self.n
        if not (0 <= self.x_mask < limit and 0 <= self.z_mask < limit):
            raise ValueError(f"Masks do not fit into {self.n} qubits.")

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n)

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Dense label, one letter per qubit, qubit 0 first."""
        x_mask = z_mask = 0
        for q, c in enumerate(label.upper()):
            if c not in _BITS:
                raise ValueError(f"Invalid Pauli letter {c!r} in {label!r}.")
            xb, zb = _BITS[c]
            x_mask |= xb << q
            z_mask |= zb << q
        return cls(len(label), x_mask, z_mask)

    @classmethod
    def from_sparse(cls, n: int, letters: Mapping[int, str]) -> "PauliString":
        """Build from a {qubit: letter} mapping."""
        x_mask = z_mask = 0
        for q, c in letters.items():
            if not 0 <= q < n:
                raise ValueError(f"Qubit {q} out of range for n={n}.")
            xb, zb = _BITS[c.upper()]
            x_mask |= xb << q
            z_mask |= zb << q
        return cls(n, x_mask, z_mask)

    @classmethod
    def parse(cls, text: str, n: int) -> "PauliString":
        """Parse the sparse form, e.g. ``"Z0 Z1"`` or ``"X3Y4"``."""
        tokens = re.findall(r"([IXYZixyz])\s*(\d+)", text)
        if not tokens and text.strip() not in ("", "I"):
            raise ValueError(f"Cannot parse Pauli string {text!r}.")
        letters: Dict[int, str] = {}
        for c, q in tokens:
            if int(q) in letters:
                raise ValueError(f"Qubit {q} repeated in {text!r}.")
            letters[int(q)] = c
        return cls.from_sparse(n, letters)

    @property
    def support_mask(self) -> int:
        return self.x_mask | self.z_mask

    @property
    def weight(self) -> int:
        return _popcount(self.support_mask)

    @property
    def is_identity(self) -> bool:
        return self.support_mask == 0

    @property
    def support(self) -> Tuple[int, ...]:
        mask = self.support_mask
        return tuple(q for q in range(self.n) if (mask >> q) & 1)

    @property
    def label(self) -> str:
        return "".join(self.letter(q) for q in range(self.n))

    def letter(self, q: int) -> str:
        self._check_qubit(q)
        return LETTERS[_code(self.x_mask, self.z_mask, q)]

    def letters(self, qubits: Sequence[int]) -> str:
        return "".join(self.letter(q) for q in qubits)

    def replace(self, qubits: Sequence[int], letters: str) -> "PauliString":
        """Return a copy with `letters` written onto `qubits`."""
        x_mask, z_mask = self.x_mask, self.z_mask
        for q, c in zip(qubits, letters):
            self._check_qubit(q)
            xb, zb = _BITS[c]
            x_mask = (x_mask & ~(1 << q)) | (xb << q)
            z_mask = (z_mask & ~(1 << q)) | (zb << q)
        return PauliString(self.n, x_mask, z_mask)

    def _check_qubit(self, q: int) -> None:
        if not 0 <= q < self.n:
            raise ValueError(f"Qubit index {q} out of range for n={self.n}.")

    def __str__(self) -> str:
        if self.is_identity:
            return "I"
        return "".join(f"{self.letter(q)}{q}" for q in self.support)


def _code(x_mask: int, z_mask: int, q: int) -> int:
    xb = (x_mask >> q) & 1
    zb = (z_mask >> q) & 1
    if xb and zb:
        return 2
    if xb:
        return 1
    return 3 if zb else 0


@dataclass(frozen=True)
class SignedPauliTerm:
    """A real coefficient times a Pauli string."""

    coeff: float
    string: PauliString


@dataclass(frozen=True)
class Observable:
    """A real linear combination sum_k a_k O_k of distinct Pauli strings.

    Args:
        terms: Tuple of (a_k, O_k) pairs.
        max_terms: Optional. Upper bound g(n) on the number of terms.
    """

    terms: Tuple[Tuple[float, PauliString], ...]
    max_terms: Optional[int] = field(default=None, compare=False)

    def __post_init__(self):
        assert len(self.terms) > 0, "Observable needs at least one term."
        n = self.terms[0][1].n
        seen = set()
        for coeff, string in self.terms:
            if string.n != n:
                raise ValueError("All terms must act on the same qubit count.")
            if string in seen:
                raise ValueError(f"Duplicate observable term {string}.")
            if not math.isfinite(coeff):
                raise ValueError(f"Non-finite coefficient for {string}.")
            seen.add(string)
        if self.max_terms is not None and len(self.terms) > self.max_terms:
            raise ValueError(
                f"Observable has {len(self.terms)} terms, "
                f"more than the bound {self.max_terms}."
            )

    @classmethod
    def single(cls, string: PauliString, coeff: float = 1.0) -> "Observable":
        return cls(((coeff, string),))

    @classmethod
    def parse(cls, text: str, n: int) -> "Observable":
        """Parse ``"0.5*Z0Z1 + X2 - 2*Y3"``."""
        terms = []
        for sign, chunk in re.findall(r"([+-]?)\s*([^+-]+)", text.replace(" ", "")):
            if "*" in chunk:
                coeff_text, pauli_text = chunk.split("*", 1)
                coeff = float(coeff_text)
            else:
                coeff, pauli_text = 1.0, chunk
            if sign == "-":
                coeff = -coeff
            terms.append((coeff, PauliString.parse(pauli_text, n)))
        if not terms:
            raise ValueError(f"Cannot parse observable {text!r}.")
        return cls(tuple(terms))

    @property
    def n(self) -> int:
        return self.terms[0][1].n

    @property
    def g(self) -> int:
        return len(self.terms)

    @property
    def frobenius_norm(self) -> float:
        """sqrt(sum a_k^2), a lower bound on the operator norm."""
        return math.sqrt(math.fsum(a * a for a, _ in self.terms))

    @property
    def l1_norm(self) -> float:
        return math.fsum(abs(a) for a, _ in self.terms)


_STATE_LABELS = {
    "0": (0.0, 0.0, 1.0),
    "1": (0.0, 0.0, -1.0),
    "+": (1.0, 0.0, 0.0),
    "-": (-1.0, 0.0, 0.0),
    "r": (0.0, 1.0, 0.0),
    "l": (0.0, -1.0, 0.0),
}


@dataclass(frozen=True)
class ProductState:
    """A product state given by one Bloch vector (rx, ry, rz) per qubit."""

    bloch: Tuple[Tuple[float, float, float], ...]

    def __post_init__(self):
        for q, (rx, ry, rz) in enumerate(self.bloch):
            if rx * rx + ry * ry + rz * rz > 1.0 + 1e-12:
                raise ValueError(f"Bloch vector of qubit {q} is outside the ball.")

    @classmethod
    def zeros(cls, n: int) -> "ProductState":
        return cls.from_label("0" * n)

    @classmethod
    def plus(cls, n: int) -> "ProductState":
        return cls.from_label("+" * n)

    @classmethod
    def from_label(cls, label: str, n: Optional[int] = None) -> "ProductState":
        """Per-qubit label from {0, 1, +, -, r, l}; one char broadcasts to n."""
        if n is not None and len(label) == 1:
            label = label * n
        if n is not None and len(label) != n:
            raise ValueError(f"State label {label!r} does not have {n} qubits.")
        try:
            return cls(tuple(_STATE_LABELS[c] for c in label))
        except KeyError as err:
            raise ValueError(f"Invalid state label {label!r}.") from err

    @classmethod
    def from_spins(cls, spins: Sequence[int]) -> "ProductState":
        """Computational basis state with spin +1 on |0> and -1 on |1>."""
        return cls(tuple((0.0, 0.0, float(s)) for s in spins))

    @property
    def n(self) -> int:
        return len(self.bloch)


def weight(p: PauliString) -> int:
    """Number of non-identity sites of `p`."""
    return p.weight


def product_state_expectation(state: ProductState, p: PauliString) -> float:
    """tr(p rho) for a product state, the product of matching Bloch components."""
    if state.n != p.n:
        raise ValueError(f"State has {state.n} qubits but the string has {p.n}.")
    value = 1.0
    for q in p.support:
        code = _code(p.x_mask, p.z_mask, q)
        value *= state.bloch[q][code - 1]
        if value == 0.0:
            break
    return value


def conjugate_clifford(
    gate: str, qubits: Sequence[int], p: PauliString
) -> SignedPauliTerm:
    """Conjugate `p` by a named Clifford gate: returns U^dag p U.

    Args:
        gate: One of H, S, Sdg, X, Y, Z, CNOT, CZ, SWAP. For CNOT the first
            qubit is the control.
        qubits: Support of the gate.
        p: The Pauli string.

    Returns:
        A single term with coefficient +1 or -1.
    """
    for q in qubits:
        p._check_qubit(q)  # pylint: disable=protected-access
    x, z = p.x_mask, p.z_mask
    sign = 1
    if gate in CLIFFORD_1Q:
        assert len(qubits) == 1, f"{gate} acts on one qubit."
        q = qubits[0]
        xb, zb = (x >> q) & 1, (z >> q) & 1
        if gate == "H":
            # X <-> Z, Y -> -Y
            if xb and zb:
                sign = -1
            nx, nz = zb, xb
        elif gate == "S":
            # X -> -Y, Y -> X
            if xb and not zb:
                sign = -1
            nx, nz = xb, zb ^ xb
        elif gate == "Sdg":
            # X -> Y, Y -> -X
            if xb and zb:
                sign = -1
            nx, nz = xb, zb ^ xb
        elif gate == "X":
            sign = -1 if zb else 1
            nx, nz = xb, zb
        elif gate == "Y":
            sign = -1 if xb ^ zb else 1
            nx, nz = xb, zb
        else:
            sign = -1 if xb else 1
            nx, nz = xb, zb
        x = (x & ~(1 << q)) | (nx << q)
        z = (z & ~(1 << q)) | (nz << q)
    elif gate in CLIFFORD_2Q:
        assert len(qubits) == 2, f"{gate} acts on two qubits."
        a, b = qubits
        if a == b:
            raise ValueError(f"{gate} needs two distinct qubits.")
        xa, za = (x >> a) & 1, (z >> a) & 1
        xb, zb = (x >> b) & 1, (z >> b) & 1
        if gate == "CNOT":
            if xa and zb and not (xb ^ za):
                sign = -1
            nxa, nza, nxb, nzb = xa, za ^ zb, xb ^ xa, zb
        elif gate == "CZ":
            if xa and xb and (za ^ zb):
                sign = -1
            nxa, nza, nxb, nzb = xa, za ^ xb, xb, zb ^ xa
        else:
            nxa, nza, nxb, nzb = xb, zb, xa, za
        x = (x & ~((1 << a) | (1 << b))) | (nxa << a) | (nxb << b)
        z = (z & ~((1 << a) | (1 << b))) | (nza << a) | (nzb << b)
    else:
        raise ValueError(f"Unknown Clifford gate {gate!r}.")
    return SignedPauliTerm(float(sign), PauliString(p.n, x, z))


_INV_SQRT2 = 1.0 / math.sqrt(2.0)


def branch_t(qubit: int, p: PauliString, dagger: bool = False) -> List[SignedPauliTerm]:
    """Conjugate `p` by a T gate (T^dag X T = (X - Y)/sqrt(2)).

    With `dagger=True` the gate is T^dag and the Y components flip sign.
    Letters I and Z pass through with coefficient 1.
    """
    c = p.letter(qubit)
    s = -1.0 if dagger else 1.0
    if c == "X":
        return [
            SignedPauliTerm(_INV_SQRT2, p),
            SignedPauliTerm(-s * _INV_SQRT2, p.replace((qubit,), "Y")),
        ]
    if c == "Y":
        return [
            SignedPauliTerm(_INV_SQRT2, p),
            SignedPauliTerm(s * _INV_SQRT2, p.replace((qubit,), "X")),
        ]
    return [SignedPauliTerm(1.0, p)]


def conjugate_generic(
    matrix: torch.Tensor, qubits: Sequence[int], p: PauliString
) -> List[SignedPauliTerm]:
    """Conjugate `p` by an explicit unitary on up to three qubits.

    The first support qubit is the most significant tensor factor of
    `matrix`. Coefficients below 1e-12 are dropped.
    """
    for q in qubits:
        p._check_qubit(q)  # pylint: disable=protected-access
    table = transfer_table(matrix)
    return [
        SignedPauliTerm(coeff, p.replace(qubits, local))
        for local, coeff in table[p.letters(qubits)]
    ]
