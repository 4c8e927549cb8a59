"""
Copyright (c) 2024 The pauliflow authors.

QAOA circuits for Ising models on a 2D lattice. A variational layer is
e^{-i alpha X} e^{-i gamma H}, with e^{-i gamma H} split into computing
blocks V_1, ..., V_M separated by SWAP-only permuting layers S_1, ...,
S_{M-1}.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Literal, Optional, Sequence, Tuple

from . import gates as G
from .circuit import Circuit, Coord, Gate, validate
from .ising import IsingModel

logger = logging.getLogger(__name__)

MIXERS = ("rx", "h-rz-h")
_ANGLE_ATOL = 1e-12
_RZ_NAMED = {0: None, 1: "T", 2: "S", 4: "Z", 6: "Sdg", 7: "Tdg"}


class EmbeddingError(ValueError):
    """Raised when a SWAP schedule never makes an edge adjacent."""

    def __init__(self, edge: Tuple[int, int]):
        super().__init__(f"Edge {edge} is never adjacent under the SWAP schedule.")
        self.edge = edge


def _adjacent(a: Coord, b: Coord) -> bool:
    return abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1


@dataclass(frozen=True)
class Embedding:
    """Initial placement of every spin and a schedule of SWAP layers.

    Args:
        lattice: (Lx, Ly).
        placement: Lattice site of spin i.
        swap_layers: Each layer is a tuple of disjoint adjacent site pairs.
    """

    lattice: Tuple[int, int]
    placement: Tuple[Coord, ...]
    swap_layers: Tuple[Tuple[Tuple[Coord, Coord], ...], ...] = ()

    def __post_init__(self):
        lx, ly = self.lattice
        if len(set(self.placement)) != len(self.placement):
            raise ValueError("Two spins share a lattice site.")
        for x, y in self.placement:
            if not (0 <= x < lx and 0 <= y < ly):
                raise ValueError(f"Site {(x, y)} lies outside the lattice.")
        for k, layer in enumerate(self.swap_layers):
            if not layer:
                raise ValueError(f"SWAP layer {k} is empty.")
            used = set()
            for a, b in layer:
                if not _adjacent(a, b):
                    raise ValueError(f"SWAP layer {k}: {a} and {b} are not adjacent.")
                if a in used or b in used:
                    raise ValueError(f"SWAP layer {k}: overlapping pairs.")
                used.update((a, b))

    @property
    def num_stages(self) -> int:
        return len(self.swap_layers) + 1

    def placements(self) -> List[Tuple[Coord, ...]]:
        """Placement before computing stage s, for s = 0..M-1."""
        current = list(self.placement)
        out = [tuple(current)]
        for layer in self.swap_layers:
            current = _apply_swaps(current, layer)
            out.append(tuple(current))
        return out


def _apply_swaps(placement: Sequence[Coord], layer) -> List[Coord]:
    move = {}
    for a, b in layer:
        move[a], move[b] = b, a
    return [move.get(s, s) for s in placement]


def native_embedding(model: IsingModel) -> Embedding:
    """Identity embedding from the model's own placement, no SWAPs."""
    if model.placement is None:
        raise ValueError("A native embedding needs a placed model.")
    return Embedding(model.lattice, model.placement)


def snake_path(lattice: Tuple[int, int]) -> List[Coord]:
    """Boustrophedon order: even rows left to right, odd rows right to left."""
    lx, ly = lattice
    return [(x if y % 2 == 0 else lx - 1 - x, y) for y in range(ly) for x in range(lx)]


def linear_swap_network(
    lattice: Tuple[int, int],
    num_spins: int,
    placement: Optional[Sequence[Coord]] = None,
    rounds: Optional[int] = None,
) -> Embedding:
    """Odd-even transposition network along the snake path.

    Spins occupy the first `num_spins` snake sites. After `num_spins`
    rounds every pair of spins has been adjacent at least once.
    """
    path = snake_path(lattice)
    if num_spins > len(path):
        raise ValueError(f"{num_spins} spins do not fit on the lattice {lattice}.")
    line = path[:num_spins]
    if placement is None:
        placement = line
    elif set(placement) != set(line):
        raise ValueError("Placement must fill the first snake sites.")
    rounds = num_spins if rounds is None else rounds
    layers = tuple(
        tuple((line[i], line[i + 1]) for i in range(r % 2, num_spins - 1, 2))
        for r in range(rounds)
    )
    return Embedding(lattice, tuple(placement), tuple(l for l in layers if l))


@dataclass
class QaoaLayout:
    """Bookkeeping of an emitted QAOA circuit.

    Attributes:
        gammas, alphas: Variational parameters per layer.
        computing_depths: Depth c_j of every maximal run of computing
            layers, in circuit order.
        permuting_depths: Depth of each S_k of one variational layer.
        roles: "computing" or "permuting" per circuit layer.
        initial_placement, final_placement: Site of every spin before the
            first and after the last layer.
        edge_stage: Computing stage at which each edge is applied.
    """

    gammas: Tuple[float, ...]
    alphas: Tuple[float, ...]
    computing_depths: Tuple[int, ...]
    permuting_depths: Tuple[int, ...]
    roles: Tuple[str, ...] = ()
    initial_placement: Tuple[Coord, ...] = ()
    final_placement: Tuple[Coord, ...] = ()
    edge_stage: Dict[Tuple[int, int], int] = field(default_factory=dict)

    @property
    def num_layers(self) -> int:
        return len(self.gammas)

    @property
    def lam(self) -> int:
        """Total SWAP depth of one variational layer."""
        return sum(self.permuting_depths)


def qaoa_sparseness_bound(layout: QaoaLayout) -> float:
    """Q = max_j (c_j 2^{c_j}) / lambda."""
    if layout.lam == 0:
        raise ValueError("No SWAP layers: the sparseness bound is inapplicable.")
    return max(c * 2**c for c in layout.computing_depths) / layout.lam


def _angle_slot(theta: float) -> Optional[int]:
    eighth = (theta % (2 * math.pi)) / (math.pi / 4)
    k = round(eighth)
    if abs(eighth - k) * (math.pi / 4) < _ANGLE_ATOL:
        return k % 8
    return None


def rz_gate(site: Coord, theta: float) -> Optional[Gate]:
    """Rz(theta), named when theta is a multiple of pi/4 with a name."""
    k = _angle_slot(theta)
    if k is not None and k in _RZ_NAMED:
        kind = _RZ_NAMED[k]
        return None if kind is None else Gate(kind, (site,))
    return Gate("U", (site,), G.rz(theta), label="rz")


def rx_gate(site: Coord, theta: float) -> Optional[Gate]:
    k = _angle_slot(theta)
    if k == 0:
        return None
    if k == 4:
        return Gate("X", (site,))
    return Gate("U", (site,), G.rx(theta), label="rx")


def _matchings(edges: Sequence[Tuple[int, int, float]]) -> List[List[Tuple[int, int, float]]]:
    """Greedy edge coloring into vertex-disjoint groups."""
    colors: List[Tuple[set, List]] = []
    for e in sorted(edges, key=lambda e: (e[0], e[1])):
        for used, group in colors:
            if e[0] not in used and e[1] not in used:
                used.update(e[:2])
                group.append(e)
                break
        else:
            colors.append(({e[0], e[1]}, [e]))
    return [group for _, group in colors]


def build_qaoa(
    model: IsingModel,
    params: Sequence[Tuple[float, float]],
    embedding: Embedding,
    mixer: Literal["rx", "h-rz-h"] = "rx",
) -> Tuple[Circuit, QaoaLayout]:
    """Emit the layered QAOA circuit.

    Each ZZ term becomes CNOT, Rz(2 gamma J), CNOT; each field becomes
    Rz(2 gamma b). Odd variational layers (1-based) run the SWAP schedule
    forward and even ones run it backward, so every layer starts from the
    placement the schedule expects.

    Args:
        model: The Ising model; spins are placed by `embedding`.
        params: (gamma_j, alpha_j) per variational layer.
        embedding: Placement and SWAP schedule.
        mixer: "rx" (one layer) or "h-rz-h" (three layers).

    Returns:
        The circuit and its layout.
    """
    if mixer not in MIXERS:
        raise ValueError(f"Unknown mixer {mixer!r}; choose from {MIXERS}.")
    if len(embedding.placement) != model.num_nodes:
        raise ValueError("Embedding places a different number of spins.")
    if model.degree_bound is not None and model.max_degree > model.degree_bound:
        raise ValueError("Model degree exceeds its bound.")
    placements = embedding.placements()
    M = embedding.num_stages

    by_stage: Dict[int, List[Tuple[int, int, float]]] = {s: [] for s in range(M)}
    edge_stage = {}
    for i, j, J in model.edges:
        stage = next(
            (s for s in range(M) if _adjacent(placements[s][i], placements[s][j])), None
        )
        if stage is None:
            raise EmbeddingError((i, j))
        by_stage[stage].append((i, j, J))
        edge_stage[(i, j)] = stage

    layers: List[Tuple[Gate, ...]] = []
    roles: List[str] = []

    def emit(gates: Sequence[Optional[Gate]], role: str = "computing") -> None:
        gates = tuple(g for g in gates if g is not None)
        if gates:
            layers.append(gates)
            roles.append(role)

    for j, (gamma, alpha) in enumerate(params):
        order = list(range(M)) if j % 2 == 0 else list(range(M - 1, -1, -1))
        realized = 0
        for pos, s in enumerate(order):
            place = placements[s]
            if pos == 0:
                emit([rz_gate(place[i], 2 * gamma * b) for i, b in enumerate(model.fields) if b])
            for group in _matchings(by_stage[s]):
                cnots = [Gate("CNOT", (place[a], place[b])) for a, b, _ in group]
                emit(cnots)
                emit([rz_gate(place[b], 2 * gamma * J) for _, b, J in group])
                emit(cnots)
                realized += len(group)
            if pos < M - 1:
                k = s if j % 2 == 0 else s - 1
                emit([Gate("SWAP", pair) for pair in embedding.swap_layers[k]], "permuting")
        assert realized == len(model.edges), "Every edge must be applied once per layer."
        final = placements[order[-1]]
        if mixer == "rx":
            emit([rx_gate(site, 2 * alpha) for site in final])
        else:
            emit([Gate("H", (site,)) for site in final])
            emit([rz_gate(site, 2 * alpha) for site in final])
            emit([Gate("H", (site,)) for site in final])

    circuit = Circuit(embedding.lattice, tuple(layers))
    violations = validate(circuit)
    assert not violations, f"Emitted an invalid circuit: {violations}"

    computing, run = [], 0
    for role in roles:
        if role == "computing":
            run += 1
        else:
            computing.append(run)
            run = 0
    computing.append(run)

    final_placement = placements[0] if len(params) % 2 == 0 else placements[-1]
    layout = QaoaLayout(
        gammas=tuple(g for g, _ in params),
        alphas=tuple(a for _, a in params),
        computing_depths=tuple(computing),
        permuting_depths=tuple(1 for _ in embedding.swap_layers),
        roles=tuple(roles),
        initial_placement=tuple(placements[0]),
        final_placement=tuple(final_placement),
        edge_stage=edge_stage,
    )
    logger.info(
        "Built QAOA circuit: depth %d, lambda %d, %d variational layers.",
        circuit.depth,
        layout.lam,
        layout.num_layers,
    )
    return circuit, layout


def physical_qubits(circuit: Circuit, layout: QaoaLayout) -> List[int]:
    """Qubit index holding each spin at the end of the circuit."""
    return [circuit.index(site) for site in layout.final_placement]
