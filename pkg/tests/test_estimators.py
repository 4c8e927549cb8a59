import pytest


def test_oracle_for():
    from pauliflow.circuit import Circuit
    from pauliflow.estimators import (
        DensityMatrixEstimator,
        PauliTransferEstimator,
        oracle_for,
    )

    assert isinstance(oracle_for(Circuit((2, 5))), DensityMatrixEstimator)
    big = oracle_for(Circuit((3, 4)), threads=2)
    assert isinstance(big, PauliTransferEstimator)
    assert big.threads == 2


def test_estimators_agree():
    from pauliflow.ensembles import random_clifford_t_circuit
    from pauliflow.estimators import (
        DensityMatrixEstimator,
        PauliTransferEstimator,
        TruncatedPathEstimator,
    )
    from pauliflow.pauli import Observable, ProductState

    circuit = random_clifford_t_circuit(2, 3, 4, 0.5, seed=7)
    obs = Observable.parse("Z0Z1 - 0.5*X2 + 0.25*Y5", circuit.n)
    state = ProductState.from_label("0+r-10")
    p = 0.15

    dense = DensityMatrixEstimator(check=True).value(circuit, obs, state, p)
    transfer = PauliTransferEstimator().value(circuit, obs, state, p)
    paths = TruncatedPathEstimator(None, threads=2).value(circuit, obs, state, p)
    assert transfer == pytest.approx(dense, abs=1e-9)
    assert paths == pytest.approx(dense, abs=1e-9)

    with pytest.warns(UserWarning):
        est = TruncatedPathEstimator(3, q=0.5, q_status="unverified", epsilon=0.3).estimate(
            circuit, obs, state, p
        )
    assert est.ell == 3
    assert est.q_status == "unverified"
    assert est.per_term_epsilon == pytest.approx(0.3 / 3**0.5)
    assert est.bound == pytest.approx(1.75 * circuit.n * circuit.depth * (2**0.5 * 0.85) ** 3)
    assert all(poly.degree <= 3 for poly in est.polynomials)


def test_abstract_and_invalid():
    from pauliflow.circuit import Circuit
    from pauliflow.estimators import AbstractEstimator, TruncatedPathEstimator
    from pauliflow.pauli import PauliString, ProductState

    with pytest.raises(NotImplementedError):
        AbstractEstimator().estimate(
            Circuit((1, 1)), PauliString.from_label("Z"), ProductState.zeros(1), 0.1
        )
    with pytest.raises(ValueError):
        TruncatedPathEstimator(-1)


if __name__ == "__main__":
    test_oracle_for()
    test_estimators_agree()
    test_abstract_and_invalid()
