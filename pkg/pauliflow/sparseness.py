"""
Copyright (c) 2024 The pauliflow authors.

(Q, k)-sparseness: every connected set A of at least k space-time points
(x, y, t) holds at most Q |A| magic gates.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

import networkx as nx

from .circuit import Circuit, t_census

logger = logging.getLogger(__name__)

Point = Tuple[int, int, int]


@dataclass
class SparsenessReport:
    """Outcome of `check_sparseness`.

    Attributes:
        q: Magic fraction threshold Q.
        k: Minimal subset size k.
        status: "certified", "refuted" or "inconclusive".
        witness: A refuting connected subset, if any.
        max_fraction: Largest T(A)/|A| seen over checked subsets.
        largest_size_checked: Largest subset size enumerated.
        subsets_checked: Number of connected subsets of size >= k visited.
    """

    q: float
    k: int
    status: str
    witness: Optional[Tuple[Point, ...]]
    max_fraction: float
    largest_size_checked: int
    subsets_checked: int = 0


def space_time_graph(circuit: Circuit) -> nx.Graph:
    """Points (x, y, t) for t = 0..d; edges join points with |dt| <= 1 and
    lattice distance <= 1. Node attribute `magic` marks magic gate sites.
    """
    lx, ly = circuit.lattice
    census = t_census(circuit)
    graph = nx.Graph()
    for t in range(circuit.depth + 1):
        magic = set(census.get(t, ()))
        for y in range(ly):
            for x in range(lx):
                graph.add_node((x, y, t), magic=(x, y) in magic)
    for (x, y, t) in list(graph.nodes):
        for dt in (0, 1):
            for dx, dy in ((0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)):
                other = (x + dx, y + dy, t + dt)
                if other != (x, y, t) and other in graph:
                    graph.add_edge((x, y, t), other)
    return graph


def magic_fraction(graph: nx.Graph, subset) -> float:
    subset = list(subset)
    return sum(1 for v in subset if graph.nodes[v]["magic"]) / len(subset)


def verify_witness(circuit: Circuit, witness: Sequence[Point], q: float, k: int) -> bool:
    """Recount a refuting subset directly."""
    graph = space_time_graph(circuit)
    if len(witness) < k or any(v not in graph for v in witness):
        return False
    if not nx.is_connected(graph.subgraph(witness)):
        return False
    return magic_fraction(graph, witness) > q


def _refutes(t_count: int, size: int, q: float) -> bool:
    return t_count > q * size + 1e-12


def _search_root(
    root: int,
    order: Sequence[Point],
    neighbors: List[List[int]],
    magic: List[bool],
    q: float,
    k: int,
    cap: int,
) -> Tuple[Optional[FrozenSet[int]], float, int]:
    """Connected subsets whose smallest vertex is `root` (extension method).

    Each subset is visited exactly once. Returns the first refuting subset,
    the largest fraction seen and the number of subsets of size >= k.
    """
    best = 0.0
    checked = 0
    # (subset, extension candidates, closed neighborhood, magic count)
    stack = [
        (
            frozenset([root]),
            [u for u in neighbors[root] if u > root],
            frozenset([root, *neighbors[root]]),
            int(magic[root]),
        )
    ]
    while stack:
        sub, ext, closed, t_count = stack.pop()
        size = len(sub)
        if size >= k:
            checked += 1
            best = max(best, t_count / size)
            if _refutes(t_count, size, q):
                return sub, best, checked
        if size == cap:
            continue
        ext = list(ext)
        while ext:
            w = ext.pop()
            new_ext = ext + [u for u in neighbors[w] if u > root and u not in closed]
            stack.append(
                (
                    sub | {w},
                    new_ext,
                    closed | set(neighbors[w]),
                    t_count + int(magic[w]),
                )
            )
    return None, best, checked


def check_sparseness(
    circuit: Circuit, q: float, k: int, subset_size_cap: int, threads: int = 1
) -> SparsenessReport:
    """Exhaustively test (Q, k)-sparseness over connected subsets up to a cap.

    Args:
        circuit: A valid circuit.
        q: Magic fraction threshold Q in [0, 1].
        k: Minimal subset size, k >= 1.
        subset_size_cap: Largest subset size to enumerate.
        threads: Worker count; roots are searched in parallel and the
            refutation with the smallest root wins.

    Returns:
        "refuted" with a witness on a violation, "certified" when the cap
        covers every subset size, "inconclusive" otherwise.
    """
    if k < 1:
        raise ValueError(f"k={k} must be at least 1.")
    if subset_size_cap < k:
        raise ValueError(f"subset_size_cap={subset_size_cap} is below k={k}.")
    graph = space_time_graph(circuit)
    order: List[Point] = sorted(graph.nodes, key=lambda v: (v[2], v[1], v[0]))
    index = {v: i for i, v in enumerate(order)}
    neighbors = [sorted(index[u] for u in graph.neighbors(v)) for v in order]
    magic = [bool(graph.nodes[v]["magic"]) for v in order]
    cap = min(subset_size_cap, len(order))

    def run(root: int):
        return _search_root(root, order, neighbors, magic, q, k, cap)

    roots = range(len(order))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, roots))
    else:
        results = []
        for r in roots:
            results.append(run(r))
            if results[-1][0] is not None:
                break

    best = max((r[1] for r in results), default=0.0)
    checked = sum(r[2] for r in results)
    for witness, _, _ in results:
        if witness is not None:
            points = tuple(order[i] for i in sorted(witness))
            logger.info("Sparseness refuted by a subset of %d points.", len(points))
            return SparsenessReport(q, k, "refuted", points, best, cap, checked)
    status = "certified" if cap >= len(order) else "inconclusive"
    return SparsenessReport(q, k, status, None, best, cap, checked)
