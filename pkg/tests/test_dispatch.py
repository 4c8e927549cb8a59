import math

import pytest


def _k33_circuit(params):
    from pauliflow.ising import IsingModel
    from pauliflow.qaoa import build_qaoa, linear_swap_network

    edges = tuple((i, j, 1.0) for i in range(3) for j in range(3, 6))
    model = IsingModel(6, edges, degree_bound=3)
    circuit, layout = build_qaoa(model, params, linear_swap_network((3, 3), 6))
    return model, circuit, layout


def test_native_grid_runs_block_approximation():
    from pauliflow.dispatch import dispatch_ground_energy
    from pauliflow.ising import exact_ground_energy, grid_model
    from pauliflow.qaoa import build_qaoa, native_embedding

    model = grid_model(3, 2, seed=1)
    circuit, layout = build_qaoa(model, [(0.3, 0.2)], native_embedding(model))
    report = dispatch_ground_energy(model, layout, circuit, p=0.01, epsilon=2.0)
    assert report.branch == "a"
    assert report.lam == 0
    assert report.guarantee
    assert report.details["block_size"] == 2
    exact = exact_ground_energy(model).energy
    assert abs(report.estimate - exact) <= report.bound


def test_tie_goes_to_block_approximation():
    from pauliflow.dispatch import dispatch_ground_energy

    model, circuit, layout = _k33_circuit([(0.3, 0.2)])
    report = dispatch_ground_energy(
        model, layout, circuit, p=0.01, epsilon=100.0, lambda_threshold=layout.lam
    )
    assert report.branch == "a"


def test_swap_heavy_runs_paths():
    from pauliflow.dispatch import dispatch_ground_energy
    from pauliflow.ising import energy_observable
    from pauliflow.oracle import exact_noisy_expectation
    from pauliflow.paths import count_paths, sparse_threshold
    from pauliflow.pauli import ProductState
    from pauliflow.qaoa import physical_qubits, qaoa_sparseness_bound

    model, circuit, layout = _k33_circuit([(math.pi / 4, math.pi / 8)])
    assert layout.lam > 4
    p = 0.05
    with pytest.warns(UserWarning):
        report = dispatch_ground_energy(model, layout, circuit, p=p, epsilon=0.1, cutoff=10**6)
    assert report.branch == "b"
    assert report.lam == layout.lam
    q = qaoa_sparseness_bound(layout)
    assert report.details["q"] == q
    assert report.details["threshold"] == sparse_threshold(q)
    assert report.details["ell"] == 10**6
    assert not report.guarantee

    obs = energy_observable(model, physical_qubits(circuit, layout), circuit.n)
    dense = exact_noisy_expectation(circuit, ProductState.plus(circuit.n), obs, p)
    assert report.estimate == pytest.approx(dense, abs=1e-9)

    for _, string in obs.terms:
        if string.is_identity:
            continue
        stats = count_paths(circuit, string)
        assert stats.total > 0
        assert stats.max_magic_fraction() <= q + 1e-12


def test_below_threshold_needs_cutoff():
    from pauliflow.dispatch import dispatch_ground_energy

    model, circuit, layout = _k33_circuit([(0.3, 0.2)])
    with pytest.raises(ValueError):
        dispatch_ground_energy(model, layout, circuit, p=0.05, epsilon=0.1)


if __name__ == "__main__":
    test_native_grid_runs_block_approximation()
    test_tie_goes_to_block_approximation()
    test_swap_heavy_runs_paths()
    test_below_threshold_needs_cutoff()
