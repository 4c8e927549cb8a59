"""
Copyright (c) 2024 The pauliflow authors.

Heisenberg back-propagation of Pauli strings through a layered circuit.

A Pauli path is a sequence s_0, ..., s_d with s_d the observable. Its
contribution is the product of the layer transition amplitudes times
tr(s_0 rho_0), and depolarizing noise damps it by (1 - p)^|s| with
|s| the summed weight of all d + 1 strings.
"""
import logging
import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import torch

from .accumulate import ExactSum, merge_sums
from .circuit import Circuit, Gate
from .ensembles import Architecture, sample_random_model
from .pauli import (
    CLIFFORD_1Q,
    CLIFFORD_2Q,
    Observable,
    PauliString,
    ProductState,
    SignedPauliTerm,
    branch_t,
    conjugate_clifford,
    conjugate_generic,
    product_state_expectation,
)
from .polynomial import WeightPolynomial, evaluate

logger = logging.getLogger(__name__)

MAX_ORACLE_PATHS = 1 << 24
_CACHE_LIMIT = 1 << 20
_THRESHOLD_RTOL = 1e-12


class BranchExplosionError(RuntimeError):
    """Raised when a traversal exceeds its path budget."""

    def __init__(self, count: int, limit: int):
        super().__init__(f"Path enumeration aborted after {count} paths (limit {limit}).")
        self.count = count
        self.limit = limit


class ThresholdError(ValueError):
    """Raised when p is not above the noise threshold of a cutoff rule."""


@dataclass(frozen=True)
class PauliPath:
    """One nonzero Pauli path.

    Attributes:
        strings: s_0, ..., s_d; s_d is the observable.
        coeff: Product of the transition amplitudes (without the state).
        magic: Number of magic gates met by a non-identity letter.
    """

    strings: Tuple[PauliString, ...]
    coeff: float
    magic: int

    @property
    def weight(self) -> int:
        return sum(s.weight for s in self.strings)


@dataclass
class PathStats:
    """Counts gathered during a traversal.

    Attributes:
        counts: N_w, weight -> number of nonzero paths.
        magic: (weight, magic encounters) -> number of paths.
        max_weight: Largest weight among counted paths.
        pruned: Branches cut by the weight cutoff.
    """

    counts: Dict[int, int] = field(default_factory=dict)
    magic: Dict[Tuple[int, int], int] = field(default_factory=dict)
    max_weight: int = 0
    pruned: int = 0

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def record(self, weight: int, magic: int) -> None:
        self.counts[weight] = self.counts.get(weight, 0) + 1
        self.magic[(weight, magic)] = self.magic.get((weight, magic), 0) + 1
        self.max_weight = max(self.max_weight, weight)

    def merge(self, other: "PathStats") -> "PathStats":
        for w, c in other.counts.items():
            self.counts[w] = self.counts.get(w, 0) + c
        for key, c in other.magic.items():
            self.magic[key] = self.magic.get(key, 0) + c
        self.max_weight = max(self.max_weight, other.max_weight)
        self.pruned += other.pruned
        return self

    def count_range(self, k: int = 0, ell: Optional[int] = None) -> int:
        """sum_{w=k..ell} N_w."""
        return sum(
            c for w, c in self.counts.items() if w >= k and (ell is None or w <= ell)
        )

    def max_magic_fraction(self, k: int = 1) -> float:
        """Largest magic/weight ratio over paths with weight >= k."""
        fracs = [m / w for (w, m) in self.magic if w >= k and w > 0]
        return max(fracs) if fracs else 0.0


def conjugate_gate(gate: Gate, qubits: Sequence[int], p: PauliString) -> List[SignedPauliTerm]:
    """U^dag p U for one placed gate, dispatched on the gate kind."""
    if gate.kind in CLIFFORD_1Q or gate.kind in CLIFFORD_2Q:
        return [conjugate_clifford(gate.kind, qubits, p)]
    if gate.kind == "T":
        return branch_t(qubits[0], p)
    if gate.kind == "Tdg":
        return branch_t(qubits[0], p, dagger=True)
    return conjugate_generic(gate.unitary(), qubits, p)


@dataclass
class _Node:
    t: int
    string: PauliString
    coeff: float
    weight: int
    magic: int
    history: tuple  # (s_t, history of s_{t+1}) linked list


class _Walker:
    """Depth-first walk over the path tree of one circuit."""

    def __init__(self, circuit: Circuit, cutoff: Optional[int], max_paths: Optional[int]):
        circuit.check()
        self.n = circuit.n
        self.depth = circuit.depth
        self.cutoff = cutoff
        self.max_paths = max_paths
        self.layers = [
            [(g, circuit.qubit_indices(g), g.is_magic) for g in layer]
            for layer in circuit.layers
        ]
        self._cache: Dict[Tuple[int, PauliString], Tuple[Tuple[Tuple[float, PauliString], ...], int]] = {}

    def step(self, t: int, s: PauliString) -> Tuple[Tuple[Tuple[float, PauliString], ...], int]:
        """Children of s_t through layer t and the magic gates it meets."""
        key = (t, s)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        terms: List[Tuple[float, PauliString]] = [(1.0, s)]
        encounters = 0
        mask = s.support_mask
        for gate, qubits, magic in self.layers[t - 1]:
            if not any((mask >> q) & 1 for q in qubits):
                continue
            if magic:
                encounters += 1
            terms = [
                (c * term.coeff, term.string)
                for c, cur in terms
                for term in conjugate_gate(gate, qubits, cur)
            ]
        out = (tuple(terms), encounters)
        if len(self._cache) < _CACHE_LIMIT:
            self._cache[key] = out
        return out

    def roots(self, obs: PauliString, stats: PathStats) -> List[_Node]:
        if obs.n != self.n:
            raise ValueError(f"Observable has {obs.n} qubits, circuit has {self.n}.")
        if obs.is_identity:
            raise ValueError("The identity observable has no Pauli paths.")
        if self.cutoff is not None and obs.weight + self.depth > self.cutoff:
            stats.pruned += 1
            return []
        return [_Node(self.depth, obs, 1.0, obs.weight, 0, (obs, None))]

    def expand(self, node: _Node, stats: PathStats) -> List[_Node]:
        children, encounters = self.step(node.t, node.string)
        out = []
        for c, s in children:
            assert not s.is_identity, "Unitary conjugation produced the identity."
            w = node.weight + s.weight
            if self.cutoff is not None and w + (node.t - 1) > self.cutoff:
                stats.pruned += 1
                continue
            out.append(
                _Node(node.t - 1, s, node.coeff * c, w, node.magic + encounters, (s, node.history))
            )
        return out

    def leaves(self, start: Sequence[_Node], stats: PathStats) -> Iterator[_Node]:
        stack = list(reversed(start))
        emitted = 0
        while stack:
            node = stack.pop()
            if node.t == 0:
                emitted += 1
                if self.max_paths is not None and emitted > self.max_paths:
                    raise BranchExplosionError(emitted, self.max_paths)
                yield node
                continue
            stack.extend(reversed(self.expand(node, stats)))

    def frontier(self, obs: PauliString, stats: PathStats, width: int) -> List[_Node]:
        """Breadth-first split of the tree into at least `width` subtrees."""
        nodes = self.roots(obs, stats)
        while nodes and len(nodes) < width and all(n.t > 0 for n in nodes):
            nodes = [child for n in nodes for child in self.expand(n, stats)]
        return nodes


def _unwind(history: tuple) -> Tuple[PauliString, ...]:
    out = []
    while history is not None:
        s, history = history
        out.append(s)
    return tuple(out)


class PathStream:
    """Iterable of (PauliPath, f) over the nonzero paths of a circuit.

    `stats` is complete once the stream is exhausted.
    """

    def __init__(self, walker: _Walker, obs: PauliString, state: ProductState):
        if state.n != walker.n:
            raise ValueError(f"State has {state.n} qubits, circuit has {walker.n}.")
        self._walker = walker
        self._obs = obs
        self._state = state
        self.stats = PathStats()

    def __iter__(self) -> Iterator[Tuple[PauliPath, float]]:
        walker, stats = self._walker, self.stats
        for leaf in walker.leaves(walker.roots(self._obs, stats), stats):
            f = leaf.coeff * product_state_expectation(self._state, leaf.string)
            if f == 0.0:
                continue
            stats.record(leaf.weight, leaf.magic)
            yield PauliPath(_unwind(leaf.history), leaf.coeff, leaf.magic), f


def enumerate_paths(
    circuit: Circuit,
    obs: PauliString,
    state: ProductState,
    cutoff: Optional[int] = None,
    max_paths: Optional[int] = None,
) -> PathStream:
    """Stream all paths with nonzero f and weight at most `cutoff`.

    Args:
        circuit: A valid circuit.
        obs: Non-identity Pauli observable s_d.
        state: Product input state.
        cutoff: Optional. Weight cutoff ell; None means unbounded.
        max_paths: Optional. Abort with BranchExplosionError beyond this.

    Examples:

    .. code-block:: python

        >>> stream = enumerate_paths(circuit, obs, state, cutoff=8)
        >>> for path, f in stream:
        >>>     print(path.weight, f)
        >>> stream.stats.counts

    """
    return PathStream(_Walker(circuit, cutoff, max_paths), obs, state)


def _run_parallel(
    walker: _Walker,
    obs: PauliString,
    threads: int,
    visit: Callable[[Sequence[_Node], PathStats], object],
) -> Tuple[List[object], PathStats]:
    stats = PathStats()
    if threads <= 1:
        local = PathStats()
        out = visit(walker.roots(obs, stats), local)
        return [out], stats.merge(local)
    nodes = walker.frontier(obs, stats, width=4 * threads)
    locals_ = [PathStats() for _ in nodes]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(lambda i: visit([nodes[i]], locals_[i]), range(len(nodes))))
    for local in locals_:
        stats.merge(local)
    return results, stats


def _check_budget(stats: PathStats, max_paths: Optional[int]) -> None:
    if max_paths is not None and stats.total > max_paths:
        raise BranchExplosionError(stats.total, max_paths)


def accumulate_fw(
    circuit: Circuit,
    obs: PauliString,
    state: ProductState,
    cutoff: Optional[int] = None,
    threads: int = 1,
    max_paths: Optional[int] = None,
) -> WeightPolynomial:
    """F_w = sum of f(s) over nonzero paths of weight w <= cutoff.

    Sums are exact before the final rounding, so the result does not
    depend on `threads` or traversal order.
    """
    if state.n != circuit.n:
        raise ValueError(f"State has {state.n} qubits, circuit has {circuit.n}.")
    walker = _Walker(circuit, cutoff, max_paths)

    def visit(start: Sequence[_Node], local: PathStats) -> Dict[int, ExactSum]:
        sums: Dict[int, ExactSum] = {}
        for leaf in walker.leaves(start, local):
            f = leaf.coeff * product_state_expectation(state, leaf.string)
            if f == 0.0:
                continue
            local.record(leaf.weight, leaf.magic)
            sums.setdefault(leaf.weight, ExactSum()).add(f)
        return sums

    results, stats = _run_parallel(walker, obs, threads, visit)
    _check_budget(stats, max_paths)
    total: Dict[int, ExactSum] = {}
    for sums in results:
        merge_sums(total, sums)
    logger.debug(
        "Accumulated %d paths (pruned %d) up to weight %d.",
        stats.total,
        stats.pruned,
        stats.max_weight,
    )
    return WeightPolynomial(
        {w: acc.value for w, acc in sorted(total.items())}, dict(sorted(stats.counts.items()))
    )


def count_paths(
    circuit: Circuit,
    obs: PauliString,
    cutoff: Optional[int] = None,
    threads: int = 1,
    max_paths: Optional[int] = None,
) -> PathStats:
    """N_w histogram of paths with a nonzero transition product.

    The initial state is not involved.
    """
    walker = _Walker(circuit, cutoff, max_paths)

    def visit(start: Sequence[_Node], local: PathStats) -> None:
        for leaf in walker.leaves(start, local):
            local.record(leaf.weight, leaf.magic)

    _, stats = _run_parallel(walker, obs, threads, visit)
    _check_budget(stats, max_paths)
    return stats


@dataclass
class TruncatedEstimate:
    """Result of `expectation_truncated`.

    Attributes:
        value: sum_k a_k <O_k>_ell.
        ell: The cutoff (None when unbounded).
        bound: sum_k |a_k| n d (2^Q (1-p))^ell when Q is given.
        q: The sparseness parameter used for the bound.
        q_status: "certified" or "unverified" (user asserted).
        per_term_epsilon: epsilon / sqrt(g) when epsilon is given.
        terms: (a_k, O_k, <O_k>_ell) per term.
        polynomials: Truncated weight polynomial per term.
        runtime: Wall-clock seconds.
    """

    value: float
    ell: Optional[int]
    bound: Optional[float] = None
    q: Optional[float] = None
    q_status: Optional[str] = None
    per_term_epsilon: Optional[float] = None
    terms: List[Tuple[float, PauliString, float]] = field(default_factory=list)
    polynomials: List[WeightPolynomial] = field(default_factory=list)
    runtime: float = 0.0


def expectation_truncated(
    circuit: Circuit,
    obs: Union[Observable, PauliString],
    state: ProductState,
    p: float,
    cutoff: Optional[int],
    q: Optional[float] = None,
    q_status: str = "certified",
    epsilon: Optional[float] = None,
    threads: int = 1,
    max_paths: Optional[int] = None,
) -> TruncatedEstimate:
    """Truncated noisy expectation value sum_k a_k sum_{w<=ell} F_w (1-p)^w.

    Args:
        circuit: A valid circuit.
        obs: Observable or single Pauli string.
        state: Product input state.
        p: Depolarizing rate in [0, 1].
        cutoff: Weight cutoff ell; None keeps every path.
        q: Optional. Sparseness parameter Q used for the error bound.
        q_status: Provenance of `q`, echoed in the result.
        epsilon: Optional. Target precision, split as epsilon / sqrt(g).
        threads: Worker count for subtree-parallel accumulation.
        max_paths: Optional. Path budget per term.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"Noise rate p={p} is outside [0, 1].")
    if isinstance(obs, PauliString):
        obs = Observable.single(obs)
    tic = time.perf_counter()
    total = ExactSum()
    terms, polys = [], []
    for a, string in obs.terms:
        if string.is_identity:
            poly = WeightPolynomial({0: 1.0}, {0: 1})
        else:
            poly = accumulate_fw(circuit, string, state, cutoff, threads, max_paths)
        value = evaluate(poly, p)
        total.add(a * value)
        terms.append((a, string, value))
        polys.append(poly)

    bound = None
    if q is not None and cutoff is not None:
        if q_status == "unverified":
            warnings.warn(f"Q={q} is asserted, not certified: the error bound is conditional.")
        base = 2.0**q * (1.0 - p)
        bound = obs.l1_norm * circuit.n * max(circuit.depth, 1) * base**cutoff
    per_term = None if epsilon is None else epsilon / math.sqrt(obs.g)
    runtime = time.perf_counter() - tic
    logger.info("Truncated estimate at ell=%s took %.3fs.", cutoff, runtime)
    return TruncatedEstimate(
        value=total.value,
        ell=cutoff,
        bound=bound,
        q=q,
        q_status=None if q is None else q_status,
        per_term_epsilon=per_term,
        terms=terms,
        polynomials=polys,
        runtime=runtime,
    )


def sparse_threshold(q: float) -> float:
    """Noise rate 1 - 2^-Q above which the sparse cutoff rule applies."""
    return 1.0 - 2.0 ** (-q)


def random_threshold(q: float) -> float:
    """Noise rate 1 - 1/(1+Q) above which the random-model rule applies."""
    return 1.0 - 1.0 / (1.0 + q)


def choose_cutoff(n: int, d: int, epsilon: float, p: float, q: float, a: float = 2.0) -> int:
    """ell = ceil(max(ln(nd/eps) / ln(1/(2^Q (1-p))), a ln n)), natural log."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive.")
    base = 2.0**q * (1.0 - p)
    # Non-dyadic Q can leave the base an ulp below 1 at the threshold itself.
    if p <= sparse_threshold(q) * (1.0 + _THRESHOLD_RTOL) or base >= 1.0 - _THRESHOLD_RTOL:
        raise ThresholdError(
            f"p={p} is not above the threshold {sparse_threshold(q):.6f} for Q={q}: "
            "no efficient cutoff guaranteed."
        )
    first = 0.0 if base == 0.0 else math.log(n * d / epsilon) / math.log(1.0 / base)
    return max(0, math.ceil(max(first, a * math.log(n))))


def choose_cutoff_random(
    n: int, d: int, epsilon: float, delta: float, p: float, q: float
) -> Tuple[int, float]:
    """Random-model cutoff and its Markov failure bound nd c^ell / eps."""
    if epsilon <= 0 or not 0 < delta < 1:
        raise ValueError("Need epsilon > 0 and delta in (0, 1).")
    c = (1.0 - p) * (1.0 + q)
    if c >= 1.0:
        raise ThresholdError(
            f"p={p} is not above the threshold {random_threshold(q):.6f} for Q={q}."
        )
    if c == 0.0:
        return 0, 0.0
    ell = max(0, math.ceil(math.log(n * d / (delta * epsilon)) / math.log(1.0 / c)))
    return ell, n * d * c**ell / epsilon


def choose_cutoff_norm(n: int, d: int, epsilon: float, p: float, l2: float) -> int:
    """ell = ceil(ln(eps / (nd ||F||_2)) / ln(1 - p))."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive.")
    if p <= 0.0:
        raise ThresholdError("The norm-based cutoff needs p > 0.")
    ratio = epsilon / (n * max(d, 1) * l2) if l2 > 0 else 1.0
    if p >= 1.0 or ratio >= 1.0:
        return 0
    return math.ceil(math.log(ratio) / math.log(1.0 - p))


def path_amplitude(
    circuit: Circuit, strings: Sequence[PauliString], state: ProductState
) -> float:
    """f(s) of one explicit path s_0, ..., s_d."""
    if len(strings) != circuit.depth + 1:
        raise ValueError(f"A path needs {circuit.depth + 1} strings, got {len(strings)}.")
    walker = _Walker(circuit, None, None)
    coeff = 1.0
    for t in range(circuit.depth, 0, -1):
        children, _ = walker.step(t, strings[t])
        coeff *= math.fsum(c for c, s in children if s == strings[t - 1])
        if coeff == 0.0:
            return 0.0
    return coeff * product_state_expectation(state, strings[0])


def orthogonality_probe(
    ensemble: Sequence[Tuple[float, Circuit]],
    path_a: Sequence[PauliString],
    path_b: Sequence[PauliString],
    state: ProductState,
) -> float:
    """Exact mixture average E[f(a) f(b)] over a weighted circuit ensemble."""
    weights = math.fsum(w for w, _ in ensemble)
    assert abs(weights - 1.0) < 1e-12, f"Ensemble weights sum to {weights}, not 1."
    acc = ExactSum()
    for w, circuit in ensemble:
        acc.add(w * path_amplitude(circuit, path_a, state) * path_amplitude(circuit, path_b, state))
    return acc.value


@dataclass
class RandomModelStats:
    """Monte-Carlo estimate of the mean of sum_{w<=ell} N_w."""

    q: float
    ell: int
    trials: int
    mean: float
    stderr: float
    ci_low: float
    ci_high: float
    bound: float
    samples: List[int]

    @property
    def within_bound(self) -> bool:
        """mean <= (1+Q)^ell up to a 3-sigma allowance."""
        return self.mean <= self.bound + 3.0 * self.stderr


def random_model_statistics(
    architecture: Architecture,
    q: float,
    trials: int,
    cutoff: int,
    seed: int = 0,
    obs: Optional[PauliString] = None,
    policy: str = "always-T-when-free",
    threads: int = 1,
) -> RandomModelStats:
    """Sample `trials` circuits from the random model and count their paths.

    Args:
        architecture: An `Architecture` of gate slots.
        q: Probability that a single-qubit slot is free.
        trials: Number of sampled circuits.
        cutoff: Weight cutoff ell.
        seed: Master seed; trial seeds are drawn from it.
        obs: Optional. Observable, default Z on qubit 0.
        policy: Name of the gate-choice policy.
    """
    if trials < 1:
        raise ValueError("Need at least one trial.")
    n = architecture.n
    if obs is None:
        obs = PauliString.from_sparse(n, {0: "Z"})
    gen = torch.Generator().manual_seed(seed)
    seeds = torch.randint(0, 2**31 - 1, (trials,), generator=gen).tolist()
    samples = []
    for s in seeds:
        circuit = sample_random_model(architecture, q, policy=policy, seed=s)
        samples.append(count_paths(circuit, obs, cutoff, threads=threads).count_range(0, cutoff))
    values = torch.tensor(samples, dtype=torch.float64)
    mean = values.mean().item()
    stderr = values.std().item() / math.sqrt(trials) if trials > 1 else 0.0
    return RandomModelStats(
        q=q,
        ell=cutoff,
        trials=trials,
        mean=mean,
        stderr=stderr,
        ci_low=mean - 1.96 * stderr,
        ci_high=mean + 1.96 * stderr,
        bound=(1.0 + q) ** cutoff,
        samples=samples,
    )
