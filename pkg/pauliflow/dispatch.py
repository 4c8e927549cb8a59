"""
Copyright (c) 2024 The pauliflow authors.

Either the model embeds with little SWAP overhead and the block
approximation solves it classically, or the SWAP layers dilute the
magic enough that noisy QAOA is simulable by truncated Pauli paths.
"""
import logging
import warnings
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

from .circuit import Circuit
from .ising import IsingModel, approx_ground_energy, energy_observable
from .paths import choose_cutoff, expectation_truncated, sparse_threshold
from .pauli import ProductState
from .qaoa import QaoaLayout, physical_qubits, qaoa_sparseness_bound

logger = logging.getLogger(__name__)


@dataclass
class DispatchReport:
    """Which branch ran and what it produced.

    Attributes:
        branch: "a" (classical block approximation) or "b" (noisy circuit
            simulation by truncated Pauli paths).
        estimate: Ground energy E0' (branch a) or noisy <H> (branch b).
        bound: Error bound of the branch.
        guarantee: False when branch b runs below the noise threshold.
        details: Branch-specific numbers (L, Q, threshold, ell, ...).
    """

    branch: str
    estimate: float
    bound: Optional[float]
    lam: int
    guarantee: bool = True
    details: Dict[str, Any] = field(default_factory=dict)


def dispatch_ground_energy(
    model: IsingModel,
    layout: QaoaLayout,
    circuit: Circuit,
    p: float,
    epsilon: float,
    lambda_threshold: int = 4,
    cutoff: Optional[int] = None,
    a: float = 2.0,
    threads: int = 1,
    max_paths: Optional[int] = None,
) -> DispatchReport:
    """Route to the classical or the path-simulation branch by lambda.

    Args:
        model: The Ising model the layout was built from.
        layout: Layout returned by `build_qaoa`.
        circuit: Circuit returned by `build_qaoa`.
        p: Depolarizing rate.
        epsilon: Target precision.
        lambda_threshold: lambda <= threshold runs branch a (ties included).
        cutoff: Optional. Explicit ell for branch b; chosen from the noise
            threshold rule when omitted.
        a: Constant of the a ln n floor of the automatic cutoff.
    """
    lam = layout.lam
    if lam <= lambda_threshold:
        placed = model
        if placed.placement is None:
            placed = model.with_placement(layout.initial_placement, circuit.lattice)
        res = approx_ground_energy(placed, epsilon=epsilon, threads=threads)
        logger.info("lambda=%d <= %d: block approximation.", lam, lambda_threshold)
        return DispatchReport(
            "a",
            res.energy,
            res.bound,
            lam,
            details={"block_size": res.decomposition.block_size, "dropped_bound": res.dropped_bound},
        )

    q = qaoa_sparseness_bound(layout)
    threshold = sparse_threshold(q)
    guarantee = p > threshold
    term_eps = epsilon / (model.j_max * model.delta / 2.0 + model.b_max)
    if cutoff is None:
        if not guarantee:
            raise ValueError(
                f"p={p} is below the threshold {threshold:.6f} for Q={q:.4g}: "
                "no guarantee, pass an explicit cutoff."
            )
        cutoff = choose_cutoff(circuit.n, circuit.depth, term_eps, p, q, a)
    if not guarantee:
        warnings.warn(f"p={p} is below the threshold {threshold:.6f}: no guarantee.")
    obs = energy_observable(model, physical_qubits(circuit, layout), circuit.n)
    est = expectation_truncated(
        circuit,
        obs,
        ProductState.plus(circuit.n),
        p,
        cutoff,
        q=q,
        q_status="derived",
        epsilon=epsilon,
        threads=threads,
        max_paths=max_paths,
    )
    return DispatchReport(
        "b",
        est.value,
        est.bound,
        lam,
        guarantee,
        details={"q": q, "threshold": threshold, "ell": cutoff, "term_epsilon": term_eps},
    )
