from typing import Any, Union

from ..circuit import Circuit
from ..pauli import Observable, PauliString, ProductState


class AbstractEstimator:
    """An abstract estimator of noisy expectation values."""

    name: str = "abstract"

    def estimate(
        self,
        circuit: Circuit,
        obs: Union[Observable, PauliString],
        state: ProductState,
        p: float,
    ) -> Any:
        raise NotImplementedError

    def value(
        self,
        circuit: Circuit,
        obs: Union[Observable, PauliString],
        state: ProductState,
        p: float,
    ) -> float:
        """The estimate as a plain float."""
        out = self.estimate(circuit, obs, state, p)
        return float(getattr(out, "value", out))
