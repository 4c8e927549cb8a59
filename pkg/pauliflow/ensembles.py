"""
Copyright (c) 2024 The pauliflow authors.

Random Clifford+T circuits: every single-qubit slot is independently
"free" with probability Q, and a policy decides what goes into it.
"""
from dataclasses import dataclass
from typing import Dict, Tuple, Type

import torch

from .circuit import Circuit, Coord, Gate
from .pauli import CLIFFORD_1Q, CLIFFORD_2Q


@dataclass(frozen=True)
class Slot:
    """A gate position of fixed arity."""

    qubits: Tuple[Coord, ...]

    @property
    def arity(self) -> int:
        return len(self.qubits)


@dataclass(frozen=True)
class Architecture:
    """A circuit skeleton: lattice plus layers of slots."""

    lattice: Tuple[int, int]
    layers: Tuple[Tuple[Slot, ...], ...]

    @property
    def n(self) -> int:
        return self.lattice[0] * self.lattice[1]

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def num_single_slots(self) -> int:
        return sum(1 for layer in self.layers for s in layer if s.arity == 1)


def _pairs(lx: int, ly: int, pattern: int) -> Tuple[Slot, ...]:
    """Nearest-neighbor pairs: 0/1 horizontal even/odd, 2/3 vertical even/odd."""
    slots = []
    if pattern < 2:
        for y in range(ly):
            for x in range(pattern, lx - 1, 2):
                slots.append(Slot(((x, y), (x + 1, y))))
    else:
        for x in range(lx):
            for y in range(pattern - 2, ly - 1, 2):
                slots.append(Slot(((x, y), (x, y + 1))))
    return tuple(slots)


def brickwork_architecture(lx: int, ly: int, depth: int) -> Architecture:
    """Alternating single-qubit layers and brickwork two-qubit layers.

    Odd layers (1-based) hold a 1-qubit slot on every site; even layers
    cycle through the horizontal and vertical pairings.
    """
    assert depth >= 0, "Depth must be non-negative."
    patterns = [0, 1] + ([2, 3] if ly > 1 else [])
    if lx == 1:
        patterns = [2, 3] if ly > 1 else []
    singles = tuple(Slot(((x, y),)) for y in range(ly) for x in range(lx))
    layers = []
    for t in range(depth):
        if t % 2 == 0 or not patterns:
            layers.append(singles)
        else:
            layers.append(_pairs(lx, ly, patterns[(t // 2) % len(patterns)]))
    return Architecture((lx, ly), tuple(layers))


def _randint(high: int, generator: torch.Generator) -> int:
    return int(torch.randint(0, high, (1,), generator=generator).item())


class GatePolicy:
    """Chooses the gate that fills one slot."""

    name = "abstract"

    def single(self, slot: Slot, free: bool, generator: torch.Generator) -> Gate:
        raise NotImplementedError

    def double(self, slot: Slot, generator: torch.Generator) -> Gate:
        """Any two-qubit Clifford, uniformly from CNOT, CZ and SWAP."""
        return Gate(CLIFFORD_2Q[_randint(len(CLIFFORD_2Q), generator)], slot.qubits)


class AlwaysTPolicy(GatePolicy):
    """Adversarial choice: every free slot gets a T gate."""

    name = "always-T-when-free"

    def single(self, slot, free, generator):
        if free:
            return Gate("T", slot.qubits)
        return Gate(CLIFFORD_1Q[_randint(len(CLIFFORD_1Q), generator)], slot.qubits)


class UniformCliffordOrTPolicy(GatePolicy):
    """Free slots draw uniformly from the single-qubit Cliffords and T."""

    name = "uniform-Clifford-or-T"

    def single(self, slot, free, generator):
        kinds = CLIFFORD_1Q + ("T",) if free else CLIFFORD_1Q
        return Gate(kinds[_randint(len(kinds), generator)], slot.qubits)


POLICIES: Dict[str, Type[GatePolicy]] = {
    AlwaysTPolicy.name: AlwaysTPolicy,
    UniformCliffordOrTPolicy.name: UniformCliffordOrTPolicy,
}


def sample_random_model(
    architecture: Architecture, q: float, policy: str = "always-T-when-free", seed: int = 0
) -> Circuit:
    """Fill every slot of `architecture`, freeing 1-qubit slots with prob. Q.

    Draws come from a seeded `torch.Generator`, so a fixed seed gives the
    same circuit bit for bit.
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"Free-slot probability Q={q} is outside [0, 1].")
    if policy not in POLICIES:
        raise ValueError(f"Unknown policy {policy!r}; choose from {sorted(POLICIES)}.")
    chooser = POLICIES[policy]()
    generator = torch.Generator().manual_seed(seed)
    layers = []
    for layer in architecture.layers:
        gates = []
        for slot in layer:
            if slot.arity == 1:
                free = torch.rand(1, generator=generator).item() < q
                gates.append(chooser.single(slot, free, generator))
            else:
                gates.append(chooser.double(slot, generator))
        layers.append(tuple(gates))
    return Circuit(architecture.lattice, tuple(layers))


def random_clifford_t_circuit(
    lx: int,
    ly: int,
    depth: int,
    q: float,
    seed: int = 0,
    policy: str = "uniform-Clifford-or-T",
) -> Circuit:
    """Random Clifford+T circuit on a brickwork skeleton."""
    return sample_random_model(brickwork_architecture(lx, ly, depth), q, policy, seed)
