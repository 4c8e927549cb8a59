"""
Copyright (c) 2024 The pauliflow authors.

Bounded-degree Ising models H = sum J_ij Z_i Z_j + sum b_i Z_i, exact
brute-force ground energies and the block approximation on 2D placements.
"""
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import networkx as nx
import torch

from .accumulate import ExactSum
from .circuit import Coord
from .pauli import Observable, PauliString

logger = logging.getLogger(__name__)

MAX_EXACT_SPINS = 26
TIE_ATOL = 1e-9


class BlockTooLargeError(ValueError):
    """Raised when a block would exceed the brute-force limit."""

    def __init__(self, spins: int, epsilon_floor: Optional[float]):
        msg = f"A block holds {spins} spins, more than {MAX_EXACT_SPINS}."
        if epsilon_floor is not None:
            msg += f" Use epsilon >= {epsilon_floor:.6g}."
        super().__init__(msg)
        self.spins = spins
        self.epsilon_floor = epsilon_floor


@dataclass(frozen=True)
class IsingModel:
    """An Ising model on `num_nodes` spins.

    Args:
        num_nodes: Number of spins n.
        edges: (i, j, J_ij) with i != j and J_ij != 0.
        fields: b_i per spin. Default to zeros.
        degree_bound: Optional. Maximum allowed degree Delta.
        placement: Optional. Lattice site (x, y) of every spin.
        lattice: Optional. (Lx, Ly); inferred from `placement` if missing.
    """

    num_nodes: int
    edges: Tuple[Tuple[int, int, float], ...] = ()
    fields: Tuple[float, ...] = ()
    degree_bound: Optional[int] = None
    placement: Optional[Tuple[Coord, ...]] = None
    lattice: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        n = self.num_nodes
        if n < 0:
            raise ValueError(f"Invalid spin count {n}.")
        if not self.fields:
            object.__setattr__(self, "fields", (0.0,) * n)
        if len(self.fields) != n:
            raise ValueError(f"Expected {n} fields, got {len(self.fields)}.")
        seen = set()
        for i, j, J in self.edges:
            if not (0 <= i < n and 0 <= j < n) or i == j:
                raise ValueError(f"Invalid edge ({i}, {j}).")
            if J == 0:
                raise ValueError(f"Edge ({i}, {j}) has zero coupling.")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValueError(f"Duplicate edge {key}.")
            seen.add(key)
        if self.degree_bound is not None and self.max_degree > self.degree_bound:
            raise ValueError(
                f"Max degree {self.max_degree} exceeds the bound {self.degree_bound}."
            )
        if self.placement is not None:
            if len(self.placement) != n or len(set(self.placement)) != n:
                raise ValueError("Placement needs one distinct site per spin.")
            if self.lattice is None:
                lx = max((x for x, _ in self.placement), default=0) + 1
                ly = max((y for _, y in self.placement), default=0) + 1
                object.__setattr__(self, "lattice", (lx, ly))
            lx, ly = self.lattice
            for x, y in self.placement:
                if not (0 <= x < lx and 0 <= y < ly):
                    raise ValueError(f"Site {(x, y)} lies outside the lattice {self.lattice}.")

    @property
    def degrees(self) -> List[int]:
        deg = [0] * self.num_nodes
        for i, j, _ in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    @property
    def max_degree(self) -> int:
        return max(self.degrees, default=0)

    @property
    def delta(self) -> int:
        return self.degree_bound if self.degree_bound is not None else self.max_degree

    @property
    def j_max(self) -> float:
        return max((abs(J) for _, _, J in self.edges), default=0.0)

    @property
    def b_max(self) -> float:
        return max((abs(b) for b in self.fields), default=0.0)

    @property
    def max_edge_length(self) -> int:
        """Largest lattice (Manhattan) distance c spanned by an edge."""
        assert self.placement is not None, "Model has no placement."
        return max(
            (
                abs(self.placement[i][0] - self.placement[j][0])
                + abs(self.placement[i][1] - self.placement[j][1])
                for i, j, _ in self.edges
            ),
            default=0,
        )

    @property
    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.num_nodes))
        for i, j, J in self.edges:
            g.add_edge(i, j, weight=J)
        return g

    def energy(self, spins: Sequence[int]) -> float:
        acc = ExactSum(J * spins[i] * spins[j] for i, j, J in self.edges)
        for b, s in zip(self.fields, spins):
            acc.add(b * s)
        return acc.value

    def with_placement(
        self, placement: Sequence[Coord], lattice: Optional[Tuple[int, int]] = None
    ) -> "IsingModel":
        return IsingModel(
            self.num_nodes, self.edges, self.fields, self.degree_bound, tuple(placement), lattice
        )


def grid_model(
    lx: int,
    ly: int,
    seed: int = 0,
    couplings: Sequence[float] = (-1.0, 1.0),
    fields: Optional[Sequence[float]] = None,
) -> IsingModel:
    """Nearest-neighbor model on an lx x ly grid with random couplings.

    Spin y * lx + x sits on site (x, y).
    """
    gen = torch.Generator().manual_seed(seed)
    edges = []
    for y in range(ly):
        for x in range(lx):
            i = y * lx + x
            if x + 1 < lx:
                edges.append((i, i + 1))
            if y + 1 < ly:
                edges.append((i, i + lx))
    picks = torch.randint(0, len(couplings), (len(edges),), generator=gen).tolist()
    return IsingModel(
        lx * ly,
        tuple((i, j, float(couplings[c])) for (i, j), c in zip(edges, picks)),
        tuple(fields) if fields is not None else (),
        degree_bound=4,
        placement=tuple((i % lx, i // lx) for i in range(lx * ly)),
        lattice=(lx, ly),
    )


def from_graph(graph: nx.Graph, default_coupling: float = 1.0, **kwargs) -> IsingModel:
    """Model on the nodes 0..n-1 of a networkx graph; `weight` gives J."""
    mapping = {v: i for i, v in enumerate(sorted(graph.nodes))}
    edges = tuple(
        (mapping[u], mapping[v], float(d.get("weight", default_coupling)))
        for u, v, d in graph.edges(data=True)
    )
    return IsingModel(len(mapping), edges, **kwargs)


def model_to_json(model: IsingModel) -> Dict[str, Any]:
    out: Dict[str, Any] = {
        "nodes": model.num_nodes,
        "edges": [[i, j, J] for i, j, J in model.edges],
        "fields": list(model.fields),
    }
    if model.degree_bound is not None:
        out["degree_bound"] = model.degree_bound
    if model.placement is not None:
        out["placement"] = [list(s) for s in model.placement]
        out["lattice"] = list(model.lattice)
    return out


def model_from_json(data: Dict[str, Any]) -> IsingModel:
    placement = data.get("placement")
    lattice = data.get("lattice")
    return IsingModel(
        int(data["nodes"]),
        tuple((int(i), int(j), float(J)) for i, j, J in data.get("edges", [])),
        tuple(float(b) for b in data.get("fields", [])),
        data.get("degree_bound"),
        tuple((int(x), int(y)) for x, y in placement) if placement else None,
        tuple(lattice) if lattice else None,
    )


def load_model(path: str) -> IsingModel:
    with open(path, "r", encoding="utf-8") as f:
        return model_from_json(json.load(f))


@dataclass
class GroundState:
    energy: float
    spins: Tuple[int, ...]


@torch.no_grad()
def exact_ground_energy(model: IsingModel, chunk_bits: int = 16) -> GroundState:
    """Brute-force minimum over all 2^n spin assignments.

    Spin +1 is bit 0 and spin 0 is the most significant bit, so among
    ties within 1e-9 the lexicographically smallest configuration (with
    + before -) is returned.
    """
    n = model.num_nodes
    if n > MAX_EXACT_SPINS:
        raise ValueError(f"{n} spins exceed the brute-force limit of {MAX_EXACT_SPINS}.")
    if n == 0:
        return GroundState(0.0, ())
    src = torch.tensor([i for i, _, _ in model.edges], dtype=torch.long)
    dst = torch.tensor([j for _, j, _ in model.edges], dtype=torch.long)
    coup = torch.tensor([J for _, _, J in model.edges], dtype=torch.float64)
    fields = torch.tensor(model.fields, dtype=torch.float64)
    shifts = torch.arange(n - 1, -1, -1, dtype=torch.long)

    total = 1 << n
    chunk = 1 << min(n, chunk_bits)
    best_energy, best_index = math.inf, -1
    for start in range(0, total, chunk):
        idx = torch.arange(start, min(start + chunk, total), dtype=torch.long)
        spins = 1.0 - 2.0 * ((idx.unsqueeze(-1) >> shifts) & 1).to(torch.float64)
        energy = spins @ fields
        if coup.numel() > 0:
            energy = energy + (spins[:, src] * spins[:, dst]) @ coup
        cmin = energy.min().item()
        if cmin < best_energy - TIE_ATOL:
            first = torch.nonzero(energy <= cmin + TIE_ATOL).flatten()[0].item()
            best_energy, best_index = cmin, start + first
    config = tuple(1 - 2 * ((best_index >> (n - 1 - j)) & 1) for j in range(n))
    return GroundState(model.energy(config), config)


@dataclass
class BlockDecomposition:
    """Blocks of an L x L tiling and the edges cut by it.

    Attributes:
        block_size: L.
        blocks: Spin indices per tile, row-major over tiles.
        kept: Edges inside a block.
        dropped: Edges crossing block boundaries.
    """

    block_size: int
    blocks: Tuple[Tuple[int, ...], ...]
    kept: Tuple[Tuple[int, int, float], ...]
    dropped: Tuple[Tuple[int, int, float], ...]


def block_decompose(model: IsingModel, block_size: int) -> BlockDecomposition:
    """Tile the lattice into ceil(Lx/L) * ceil(Ly/L) blocks."""
    if model.placement is None:
        raise ValueError("Block decomposition needs a placement.")
    if block_size < 1:
        raise ValueError(f"Block size {block_size} must be positive.")
    L = block_size
    lx, ly = model.lattice
    nbx, nby = -(-lx // L), -(-ly // L)
    tile = [(x // L) + nbx * (y // L) for x, y in model.placement]
    blocks: List[List[int]] = [[] for _ in range(nbx * nby)]
    for i, b in enumerate(tile):
        blocks[b].append(i)
    kept = tuple(e for e in model.edges if tile[e[0]] == tile[e[1]])
    dropped = tuple(e for e in model.edges if tile[e[0]] != tile[e[1]])
    return BlockDecomposition(L, tuple(tuple(b) for b in blocks), kept, dropped)


@dataclass
class ApproxGroundEnergy:
    """Result of the block approximation.

    Attributes:
        energy: E0', the sum of block minima.
        spins: The assembled configuration.
        block_configs: Minimizing configuration per block.
        bound: Formula bound on |E0' - E0|.
        dropped_bound: sum of |J| over dropped edges, also a bound.
        decomposition: The tiling used.
    """

    energy: float
    spins: Tuple[int, ...]
    block_configs: List[Tuple[int, ...]]
    bound: float
    dropped_bound: float
    decomposition: BlockDecomposition = field(repr=False)


def _block_size_for(model: IsingModel, epsilon: float) -> int:
    if not model.edges:
        return 1
    c = model.max_edge_length
    if c <= 1:
        return math.ceil(4.0 * model.j_max / epsilon)
    return math.ceil(8.0 * c * model.j_max / epsilon)


def _epsilon_floor(model: IsingModel) -> float:
    L = int(math.isqrt(MAX_EXACT_SPINS))
    c = model.max_edge_length
    return (4.0 if c <= 1 else 8.0 * c) * model.j_max / L


def approx_ground_energy(
    model: IsingModel,
    epsilon: Optional[float] = None,
    block_size: Optional[int] = None,
    threads: int = 1,
) -> ApproxGroundEnergy:
    """Drop block-crossing edges and brute-force every block.

    Args:
        model: Model with a placement.
        epsilon: Per-spin precision; sets L = ceil(4 J_max / eps) for
            nearest-neighbor models and ceil(8 c J_max / eps) otherwise.
        block_size: Explicit L instead of `epsilon`.
        threads: Blocks are minimized in parallel.
    """
    if (epsilon is None) == (block_size is None):
        raise ValueError("Give exactly one of epsilon and block_size.")
    if model.placement is None:
        raise ValueError("The block approximation needs a placement.")
    if epsilon is not None:
        if epsilon <= 0:
            raise ValueError("epsilon must be positive.")
        block_size = _block_size_for(model, epsilon)
    dec = block_decompose(model, block_size)
    largest = max((len(b) for b in dec.blocks), default=0)
    if largest > MAX_EXACT_SPINS:
        raise BlockTooLargeError(largest, _epsilon_floor(model))

    def solve(block: Tuple[int, ...]) -> GroundState:
        local = {s: i for i, s in enumerate(block)}
        sub = IsingModel(
            len(block),
            tuple((local[i], local[j], J) for i, j, J in dec.kept if i in local),
            tuple(model.fields[s] for s in block),
        )
        return exact_ground_energy(sub)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(solve, dec.blocks))
    else:
        results = [solve(b) for b in dec.blocks]

    spins = [1] * model.num_nodes
    for block, res in zip(dec.blocks, results):
        for s, v in zip(block, res.spins):
            spins[s] = v
    n, L = model.num_nodes, dec.block_size
    c = model.max_edge_length
    if c <= 1:
        bound = 4.0 * model.j_max * n / L
    else:
        bound = 8.0 * c * model.j_max * model.delta * n / L
    dropped_bound = ExactSum(abs(J) for _, _, J in dec.dropped).value
    energy = ExactSum(r.energy for r in results).value
    logger.info(
        "Block approximation with L=%d: %d blocks, %d dropped edges.",
        L,
        len(dec.blocks),
        len(dec.dropped),
    )
    return ApproxGroundEnergy(
        energy=energy,
        spins=tuple(spins),
        block_configs=[r.spins for r in results],
        bound=bound,
        dropped_bound=dropped_bound,
        decomposition=dec,
    )


def energy_observable(
    model: IsingModel,
    qubit_of: Optional[Sequence[int]] = None,
    n_qubits: Optional[int] = None,
) -> Observable:
    """H as sum_k a_k O_k: Z_i Z_j with a = J_ij and Z_i with a = b_i != 0.

    Args:
        model: The Ising model.
        qubit_of: Optional. Qubit index of every spin. Default to identity.
        n_qubits: Optional. Total qubit count. Default to the spin count.
    """
    qubit_of = list(range(model.num_nodes)) if qubit_of is None else list(qubit_of)
    n_qubits = model.num_nodes if n_qubits is None else n_qubits
    terms = [
        (J, PauliString.from_sparse(n_qubits, {qubit_of[i]: "Z", qubit_of[j]: "Z"}))
        for i, j, J in model.edges
    ]
    terms += [
        (b, PauliString.from_sparse(n_qubits, {qubit_of[i]: "Z"}))
        for i, b in enumerate(model.fields)
        if b != 0.0
    ]
    if not terms:
        raise ValueError("The model has neither couplings nor fields.")
    return Observable(tuple(terms))
