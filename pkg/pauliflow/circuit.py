"""
Copyright (c) 2024 The pauliflow authors.
"""
import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import torch

from . import gates as G
from .pauli import CLIFFORD_1Q, CLIFFORD_2Q

logger = logging.getLogger(__name__)

Coord = Tuple[int, int]

MAGIC_KINDS = ("T", "Tdg")
KINDS = CLIFFORD_1Q + CLIFFORD_2Q + MAGIC_KINDS + ("U",)


@dataclass(frozen=True)
class Gate:
    """A gate placed on lattice coordinates.

    Args:
        kind: Named Clifford (H, S, Sdg, X, Y, Z, CNOT, CZ, SWAP), T, Tdg,
            or U for an explicit unitary.
        qubits: One to three (x, y) coordinates. For CNOT the first one is
            the control; for U the first one is the most significant factor.
        matrix: Explicit 2^D x 2^D unitary. Only for kind U.
        label: Optional name of a U gate (e.g. "rz", "V").
    """

    kind: str
    qubits: Tuple[Coord, ...]
    matrix: Optional[torch.Tensor] = field(default=None, compare=False, repr=False)
    label: Optional[str] = None

    @property
    def num_qubits(self) -> int:
        return len(self.qubits)

    def unitary(self) -> torch.Tensor:
        if self.kind == "U":
            assert self.matrix is not None, "U gate without matrix."
            return self.matrix.to(G.DTYPE)
        return G.NAMED[self.kind]

    @property
    def is_clifford(self) -> bool:
        if self.kind in CLIFFORD_1Q + CLIFFORD_2Q:
            return True
        if self.kind == "U":
            return G.is_clifford(self.unitary())
        return False

    @property
    def is_magic(self) -> bool:
        """T-like gate: T, Tdg, or a non-Clifford single-qubit unitary."""
        if self.kind in MAGIC_KINDS:
            return True
        return self.kind == "U" and self.num_qubits == 1 and not self.is_clifford


@dataclass(frozen=True)
class Circuit:
    """A layered circuit on an Lx x Ly lattice.

    Qubit index of site (x, y) is ``y * Lx + x``. Layer t (1-based) is
    ``layers[t - 1]``; the Heisenberg walk visits layers d..1.
    """

    lattice: Tuple[int, int]
    layers: Tuple[Tuple[Gate, ...], ...] = ()

    def __post_init__(self):
        lx, ly = self.lattice
        assert lx >= 1 and ly >= 1, f"Invalid lattice {self.lattice}."

    @property
    def n(self) -> int:
        return self.lattice[0] * self.lattice[1]

    @property
    def depth(self) -> int:
        return len(self.layers)

    def index(self, site: Coord) -> int:
        x, y = site
        return y * self.lattice[0] + x

    def coords(self, q: int) -> Coord:
        return (q % self.lattice[0], q // self.lattice[0])

    def contains(self, site: Coord) -> bool:
        x, y = site
        return 0 <= x < self.lattice[0] and 0 <= y < self.lattice[1]

    def qubit_indices(self, gate: Gate) -> Tuple[int, ...]:
        return tuple(self.index(s) for s in gate.qubits)

    def append(self, layer: Sequence[Gate]) -> "Circuit":
        return Circuit(self.lattice, self.layers + (tuple(layer),))

    def check(self) -> None:
        violations = validate(self)
        if violations:
            raise ValueError("Invalid circuit: " + "; ".join(violations))


def _adjacent(a: Coord, b: Coord) -> bool:
    return abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1


def _connected(sites: Sequence[Coord]) -> bool:
    seen = {sites[0]}
    frontier = [sites[0]]
    while frontier:
        cur = frontier.pop()
        for s in sites:
            if s not in seen and _adjacent(cur, s):
                seen.add(s)
                frontier.append(s)
    return len(seen) == len(sites)


def validate(circuit: Circuit) -> List[str]:
    """All overlap, locality and gate-shape violations; empty means ok."""
    violations = []
    for t, layer in enumerate(circuit.layers, start=1):
        used: Dict[Coord, int] = {}
        for i, gate in enumerate(layer):
            where = f"layer {t} gate {i} ({gate.kind})"
            if gate.kind not in KINDS:
                violations.append(f"{where}: unknown kind")
                continue
            if not 1 <= gate.num_qubits <= 3:
                violations.append(f"{where}: acts on {gate.num_qubits} qubits")
                continue
            if len(set(gate.qubits)) != gate.num_qubits:
                violations.append(f"{where}: repeated qubit")
                continue
            expected = (
                1
                if gate.kind in CLIFFORD_1Q + MAGIC_KINDS
                else 2
                if gate.kind in CLIFFORD_2Q
                else None
            )
            if expected is not None and gate.num_qubits != expected:
                violations.append(f"{where}: expects {expected} qubits")
            if gate.kind == "U":
                if gate.matrix is None:
                    violations.append(f"{where}: missing matrix")
                elif tuple(gate.matrix.shape) != (2**gate.num_qubits,) * 2:
                    violations.append(f"{where}: matrix shape mismatch")
                elif not G.is_unitary(gate.matrix):
                    violations.append(f"{where}: matrix is not unitary")
            outside = [s for s in gate.qubits if not circuit.contains(s)]
            if outside:
                violations.append(f"{where}: sites {outside} outside the lattice")
                continue
            if gate.num_qubits > 1 and not _connected(gate.qubits):
                violations.append(f"{where}: sites {list(gate.qubits)} not adjacent")
            for s in gate.qubits:
                if s in used:
                    violations.append(
                        f"{where}: site {s} already used by gate {used[s]}"
                    )
                used[s] = i
    return violations


def t_census(circuit: Circuit) -> Dict[int, List[Coord]]:
    """Layer (1-based) -> coordinates of magic gates in that layer."""
    census: Dict[int, List[Coord]] = {}
    for t, layer in enumerate(circuit.layers, start=1):
        sites = [g.qubits[0] for g in layer if g.is_magic]
        if sites:
            census[t] = sites
    return census


# ---------------------------------------------------------------------------
# JSON io
# ---------------------------------------------------------------------------


def gate_to_json(gate: Gate) -> Dict[str, Any]:
    out: Dict[str, Any] = {"kind": gate.kind, "qubits": [list(s) for s in gate.qubits]}
    if gate.kind == "U":
        flat = torch.view_as_real(gate.unitary().contiguous()).reshape(-1, 2)
        out["matrix"] = flat.tolist()
    if gate.label is not None:
        out["label"] = gate.label
    return out


def gate_from_json(data: Dict[str, Any]) -> Gate:
    kind = data["kind"]
    qubits = tuple((int(x), int(y)) for x, y in data["qubits"])
    matrix = None
    if kind == "U":
        if "matrix" not in data:
            raise ValueError("U gate needs a matrix.")
        dim = 2 ** len(qubits)
        pairs = torch.tensor(data["matrix"], dtype=torch.float64)
        if tuple(pairs.shape) != (dim * dim, 2):
            raise ValueError(f"U matrix must hold {dim * dim} complex pairs.")
        matrix = torch.view_as_complex(pairs.contiguous()).reshape(dim, dim)
    return Gate(kind, qubits, matrix, data.get("label"))


def circuit_to_json(circuit: Circuit) -> Dict[str, Any]:
    return {
        "lattice": list(circuit.lattice),
        "layers": [[gate_to_json(g) for g in layer] for layer in circuit.layers],
    }


def circuit_from_json(data: Dict[str, Any]) -> Circuit:
    lx, ly = data["lattice"]
    layers = tuple(
        tuple(gate_from_json(g) for g in layer) for layer in data.get("layers", [])
    )
    return Circuit((int(lx), int(ly)), layers)


def load_circuit(path: str) -> Circuit:
    with open(path, "r", encoding="utf-8") as f:
        circuit = circuit_from_json(json.load(f))
    logger.info("Loaded %d-layer circuit on %s from %s", circuit.depth, circuit.lattice, path)
    return circuit


def dump_circuit(circuit: Circuit, path: Union[str, Any]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(circuit_to_json(circuit), f, indent=2)
