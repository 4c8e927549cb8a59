from typing import Optional, Union

from ..circuit import Circuit
from ..paths import TruncatedEstimate, expectation_truncated
from ..pauli import Observable, PauliString, ProductState
from .base import AbstractEstimator


class TruncatedPathEstimator(AbstractEstimator):
    """Pauli paths up to weight `cutoff`, optionally with the sparse error bound.

    Args:
        cutoff: Weight cutoff ell. None keeps every path.
        q: Optional. Sparseness parameter Q for the error bound.
        q_status: "certified" when Q was checked, "unverified" when asserted.
        epsilon: Optional. Target precision, reported per term.
        threads: Worker count for subtree-parallel accumulation.
    """

    name = "paths"

    def __init__(
        self,
        cutoff: Optional[int],
        q: Optional[float] = None,
        q_status: str = "certified",
        epsilon: Optional[float] = None,
        threads: int = 1,
    ) -> None:
        if cutoff is not None and cutoff < 0:
            raise ValueError(f"Invalid cutoff {cutoff}!")
        self.cutoff = cutoff
        self.q = q
        self.q_status = q_status
        self.epsilon = epsilon
        self.threads = threads

    def estimate(
        self,
        circuit: Circuit,
        obs: Union[Observable, PauliString],
        state: ProductState,
        p: float,
    ) -> TruncatedEstimate:
        return expectation_truncated(
            circuit,
            obs,
            state,
            p,
            self.cutoff,
            q=self.q,
            q_status=self.q_status,
            epsilon=self.epsilon,
            threads=self.threads,
        )
