import math

import pytest
import torch

S2 = math.sqrt(2.0)


def _psi():
    from pauliflow.pauli import ProductState

    # (|+Y> + |+>) / sqrt(3)
    return ProductState(((2.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0),))


def _one_t():
    from pauliflow.circuit import Circuit, Gate

    return Circuit((1, 1), ((Gate("T", ((0, 0),)),),))


def test_clifford_single_path():
    from pauliflow.circuit import Circuit, Gate
    from pauliflow.paths import accumulate_fw, count_paths, enumerate_paths
    from pauliflow.pauli import PauliString, ProductState

    c = Circuit((2, 1), ((Gate("H", ((0, 0),)),), (Gate("CNOT", ((0, 0), (1, 0))),)))
    obs = PauliString.from_label("IZ")
    stream = enumerate_paths(c, obs, ProductState.from_label("+0"))
    paths = list(stream)
    assert len(paths) == 1
    path, f = paths[0]
    assert [s.label for s in path.strings] == ["XZ", "ZZ", "IZ"]
    assert path.weight == 5
    assert f == 1.0
    assert stream.stats.counts == {5: 1}

    assert count_paths(c, obs).counts == {5: 1}
    poly = accumulate_fw(c, obs, ProductState.from_label("+0"))
    assert poly.coeffs == {5: 1.0}


def test_clifford_weight_three():
    from pauliflow.circuit import Circuit, Gate
    from pauliflow.paths import accumulate_fw
    from pauliflow.pauli import PauliString, ProductState

    # control on qubit 1, so Z on the target picks up Z on the control
    c = Circuit((2, 1), ((Gate("CNOT", ((1, 0), (0, 0))),),))
    poly = accumulate_fw(c, PauliString.from_label("ZI"), ProductState.zeros(2))
    assert poly.coeffs == {3: 1.0}
    assert poly.counts == {3: 1}


def test_t_gate_paths():
    from pauliflow.paths import count_paths, enumerate_paths
    from pauliflow.pauli import PauliString

    x = PauliString.from_label("X")
    stream = enumerate_paths(_one_t(), x, _psi())
    found = {tuple(s.label for s in path.strings): (f, path.magic) for path, f in stream}
    assert found.keys() == {("X", "X"), ("Y", "X")}
    assert found[("X", "X")][0] == pytest.approx(S2 / 3)
    assert found[("Y", "X")][0] == pytest.approx(-S2 / 3)
    assert all(m == 1 for _, m in found.values())
    assert stream.stats.max_magic_fraction(1) == pytest.approx(0.5)

    stats = count_paths(_one_t(), x)
    assert stats.total == 2
    assert stats.counts == {2: 2}


def test_v_gate_paths():
    from pauliflow.counterexample import counterexample_circuit, observable_ok
    from pauliflow.paths import accumulate_fw, enumerate_paths
    from pauliflow.pauli import ProductState

    c = counterexample_circuit(3)
    obs = observable_ok(3, 1)
    fs = sorted(f for _, f in enumerate_paths(c, obs, ProductState.zeros(3)))
    assert fs == [pytest.approx(-0.5), pytest.approx(0.5), pytest.approx(0.5), pytest.approx(0.5)]

    poly = accumulate_fw(c, obs, ProductState.zeros(3), cutoff=4)
    assert poly.coeffs.keys() == {2, 4}
    assert poly.get(2) == pytest.approx(1.5)
    assert poly.get(4) == pytest.approx(-0.5)
    assert poly.counts == {2: 3, 4: 1}


def test_expectation_truncated():
    from pauliflow.counterexample import counterexample_circuit, observable_ok
    from pauliflow.paths import expectation_truncated
    from pauliflow.pauli import Observable, PauliString, ProductState

    c = counterexample_circuit(3)
    obs = observable_ok(3, 1)
    state = ProductState.zeros(3)
    est = expectation_truncated(c, obs, state, 0.1, cutoff=4)
    assert est.value == pytest.approx(1.5 * 0.9**2 - 0.5 * 0.9**4)
    assert est.value == pytest.approx(0.88695)
    assert est.bound is None and est.q_status is None

    est = expectation_truncated(c, obs, state, 0.1, cutoff=3)
    assert est.value == pytest.approx(1.5 * 0.81)

    assert expectation_truncated(c, obs, state, 1.0, cutoff=None).value == 0.0

    # identity terms contribute their coefficient
    mixed = Observable(((2.0, obs), (0.25, PauliString.identity(3))))
    est = expectation_truncated(c, mixed, state, 0.0, cutoff=4, q=0.5, epsilon=0.2)
    assert est.value == pytest.approx(2.25)
    assert est.per_term_epsilon == pytest.approx(0.2 / math.sqrt(2))
    assert est.bound == pytest.approx(2.25 * 3 * 1 * (2**0.5) ** 4)
    assert est.q_status == "certified"

    with pytest.raises(ValueError):
        expectation_truncated(c, obs, state, 1.5, cutoff=4)


def test_truncation_is_a_prefix():
    from pauliflow.ensembles import random_clifford_t_circuit
    from pauliflow.paths import accumulate_fw
    from pauliflow.pauli import PauliString, ProductState

    c = random_clifford_t_circuit(2, 2, 4, 0.5, seed=3)
    obs = PauliString.from_sparse(4, {0: "Z", 1: "X"})
    state = ProductState.from_label("0+r-")
    full = accumulate_fw(c, obs, state)
    for ell in range(0, full.degree + 1, 2):
        cut = accumulate_fw(c, obs, state, cutoff=ell)
        assert cut.coeffs == full.truncated(ell).coeffs


def test_threads_do_not_change_results():
    from pauliflow.ensembles import random_clifford_t_circuit
    from pauliflow.paths import accumulate_fw, count_paths
    from pauliflow.pauli import PauliString, ProductState

    c = random_clifford_t_circuit(2, 2, 5, 0.6, seed=11)
    obs = PauliString.from_sparse(4, {3: "X"})
    state = ProductState.from_label("+0r+")
    one = accumulate_fw(c, obs, state, cutoff=12, threads=1)
    many = accumulate_fw(c, obs, state, cutoff=12, threads=4)
    assert one.coeffs == many.coeffs
    assert one.counts == many.counts
    assert count_paths(c, obs, 12, threads=1).counts == count_paths(c, obs, 12, threads=3).counts


def test_cutoff_pruning_and_budget():
    from pauliflow.circuit import Circuit, Gate
    from pauliflow.paths import BranchExplosionError, accumulate_fw, count_paths
    from pauliflow.pauli import PauliString, ProductState

    c = Circuit((2, 1), ((Gate("T", ((0, 0),)),), (Gate("CNOT", ((0, 0), (1, 0))),)))
    obs = PauliString.from_label("XI")
    stats = count_paths(c, obs)
    assert stats.counts == {5: 2}

    cut = count_paths(c, obs, cutoff=4)
    assert cut.total == 0 and cut.pruned > 0

    with pytest.raises(BranchExplosionError):
        count_paths(c, obs, max_paths=1)
    with pytest.raises(ValueError):
        accumulate_fw(c, PauliString.identity(2), ProductState.zeros(2))
    with pytest.raises(ValueError):
        accumulate_fw(c, PauliString.from_label("XIZ"), ProductState.zeros(3))


def test_counting_bound_on_sparse_circuit():
    from pauliflow.circuit import Circuit, Gate
    from pauliflow.paths import count_paths
    from pauliflow.pauli import PauliString
    from pauliflow.sparseness import check_sparseness

    c = Circuit((2, 1), ((Gate("T", ((0, 0),)),), (Gate("CNOT", ((0, 0), (1, 0))),)))
    q, k = 0.25, 4
    assert check_sparseness(c, q, k, subset_size_cap=6).status == "certified"
    stats = count_paths(c, PauliString.from_label("XI"))
    for ell in range(0, 9):
        assert stats.count_range(k, ell) <= 2 ** (q * ell)


def test_choose_cutoff():
    from pauliflow.paths import (
        ThresholdError,
        choose_cutoff,
        choose_cutoff_norm,
        choose_cutoff_random,
        sparse_threshold,
    )

    assert choose_cutoff(100, 10, 0.01, 0.3, 0.1, 2.0) == 41

    n, d, eps, p = 10, 5, 0.1, 0.2
    expected = math.ceil(max(math.log(n * d / eps) / math.log(1 / (1 - p)), 2 * math.log(n)))
    assert choose_cutoff(n, d, eps, p, 0.0) == expected

    with pytest.raises(ThresholdError):
        choose_cutoff(10, 5, 0.1, 0.5, 1.0)
    with pytest.raises(ThresholdError):
        choose_cutoff(10, 5, 0.1, sparse_threshold(0.5) / 2, 0.5)

    ell, failure = choose_cutoff_random(10, 5, 0.1, 0.05, 0.5, 0.2)
    c = 0.5 * 1.2
    assert ell == math.ceil(math.log(10 * 5 / (0.05 * 0.1)) / math.log(1 / c))
    assert 0.0 < failure <= 0.05 + 1e-12
    with pytest.raises(ThresholdError):
        choose_cutoff_random(10, 5, 0.1, 0.05, 0.1, 1.0)

    assert choose_cutoff_norm(1, 1, 0.1, 0.5, 1.0) == 4


def test_path_amplitude_and_orthogonality():
    from pauliflow.circuit import Circuit
    from pauliflow.paths import orthogonality_probe, path_amplitude
    from pauliflow.pauli import PauliString

    x, y = PauliString.from_label("X"), PauliString.from_label("Y")
    identity = Circuit((1, 1), ((),))
    assert path_amplitude(identity, (x, x), _psi()) == pytest.approx(2 / 3)
    assert path_amplitude(_one_t(), (y, x), _psi()) == pytest.approx(-S2 / 3)
    with pytest.raises(ValueError):
        path_amplitude(identity, (x,), _psi())

    for q in (0.0, 0.3, 1.0):
        ensemble = [(1.0 - q, identity), (q, _one_t())]
        value = orthogonality_probe(ensemble, (x, x), (y, x), _psi())
        assert value == pytest.approx(-2 * q / 9)
    same = orthogonality_probe([(1.0, identity)], (x, x), (x, x), _psi())
    assert same == pytest.approx(4 / 9)
    zero = PauliString.from_label("Z")
    assert orthogonality_probe([(0.5, identity), (0.5, _one_t())], (x, x), (zero, x), _psi()) == 0.0


def test_random_model_statistics():
    from pauliflow.ensembles import brickwork_architecture
    from pauliflow.paths import random_model_statistics
    from pauliflow.pauli import PauliString

    arch = brickwork_architecture(2, 1, 2)
    stats = random_model_statistics(arch, 0.0, trials=20, cutoff=6, seed=1)
    assert stats.mean == 1.0 and stats.stderr == 0.0

    single = brickwork_architecture(1, 1, 1)
    stats = random_model_statistics(
        single, 1.0, trials=5, cutoff=2, obs=PauliString.from_label("X")
    )
    assert stats.mean == 2.0

    arch = brickwork_architecture(5, 1, 4)
    stats = random_model_statistics(arch, 0.2, trials=200, cutoff=8, seed=7)
    assert stats.within_bound
    assert stats.bound == pytest.approx(1.2**8)
    again = random_model_statistics(arch, 0.2, trials=200, cutoff=8, seed=7)
    assert again.samples == stats.samples


@pytest.mark.parametrize("q", [0.1, 0.3, 0.7, 1.3, 0.45, 2.2])
def test_choose_cutoff_rejects_threshold(q):
    from pauliflow.paths import ThresholdError, choose_cutoff, sparse_threshold

    with pytest.raises(ThresholdError):
        choose_cutoff(10, 5, 0.1, sparse_threshold(q), q)
    ell = choose_cutoff(10, 5, 0.1, min(1.0, sparse_threshold(q) + 0.05), q)
    assert 0 < ell < 10**6


def test_cutoff_arguments():
    from pauliflow.paths import choose_cutoff, choose_cutoff_norm, choose_cutoff_random

    with pytest.raises(ValueError):
        choose_cutoff(10, 5, 0.0, 0.9, 0.5)
    with pytest.raises(ValueError):
        choose_cutoff_random(10, 5, 0.1, 1.0, 0.9, 0.5)
    with pytest.raises(ValueError):
        choose_cutoff_norm(10, 5, -1.0, 0.5, 1.0)


def _certified(seed):
    """A small random circuit with the tightest Q it is certified for at k = d + 1."""
    from pauliflow.ensembles import random_clifford_t_circuit
    from pauliflow.sparseness import check_sparseness

    c = random_clifford_t_circuit(2, 2, 3, 0.5, seed=seed, policy="always-T-when-free")
    k = c.depth + 1
    cap = c.n * (c.depth + 1)
    q = check_sparseness(c, 1.0, k, subset_size_cap=cap).max_fraction
    report = check_sparseness(c, q, k, subset_size_cap=cap)
    assert report.status == "certified"
    return c, q, k


@pytest.mark.parametrize("seed", range(6))
def test_truncation_bound_on_certified_circuits(seed):
    from pauliflow.oracle import exact_noisy_expectation
    from pauliflow.paths import count_paths, expectation_truncated
    from pauliflow.pauli import PauliString, ProductState

    c, q, k = _certified(seed)
    obs = PauliString.from_sparse(c.n, {seed % c.n: "XYZ"[seed % 3]})
    state = ProductState.from_label("0+r1"[: c.n])

    stats = count_paths(c, obs)
    assert stats.max_magic_fraction(k) <= q + 1e-12
    for ell in range(0, 4 * k):
        assert stats.count_range(k, ell) <= 2 ** (q * ell)

    for base in (0.45, 0.3):
        p = 1.0 - base * 2.0 ** (-q)
        exact = exact_noisy_expectation(c, state, obs, p)
        for ell in range(0, 4 * k):
            est = expectation_truncated(c, obs, state, p, ell, q=q)
            assert est.bound == pytest.approx(c.n * c.depth * base**ell)
            assert abs(est.value - exact) <= est.bound + 1e-12


@pytest.mark.parametrize("policy", ["always-T-when-free", "uniform-Clifford-or-T"])
@pytest.mark.parametrize("q", [0.1, 0.3])
def test_random_model_average(q, policy):
    from pauliflow.ensembles import brickwork_architecture
    from pauliflow.paths import random_model_statistics

    arch = brickwork_architecture(3, 1, 3)
    stats = random_model_statistics(arch, q, trials=200, cutoff=8, seed=11, policy=policy)
    assert stats.trials == len(stats.samples) == 200
    assert stats.bound == pytest.approx((1 + q) ** 8)
    assert stats.within_bound


if __name__ == "__main__":
    test_clifford_single_path()
    test_clifford_weight_three()
    test_t_gate_paths()
    test_v_gate_paths()
    test_expectation_truncated()
    test_truncation_is_a_prefix()
    test_threads_do_not_change_results()
    test_cutoff_pruning_and_budget()
    test_counting_bound_on_sparse_circuit()
    test_choose_cutoff()
    test_path_amplitude_and_orthogonality()
    test_random_model_statistics()
    for q in (0.1, 0.3, 0.7, 1.3):
        test_choose_cutoff_rejects_threshold(q)
    test_cutoff_arguments()
    for seed in range(6):
        test_truncation_bound_on_certified_circuits(seed)
    for q in (0.1, 0.3):
        test_random_model_average(q, "always-T-when-free")
