import math

import pytest

P = 0.1


def test_single_gate_polynomial():
    from pauliflow.counterexample import analytic_fw, analytic_polynomial

    assert analytic_fw(1, 2) == 1.5
    assert analytic_fw(1, 4) == -0.5
    assert analytic_fw(1, 3) == 0.0
    assert analytic_fw(2, 2) == 0.0
    assert analytic_polynomial(2).coeffs == pytest.approx({4: 2.25, 6: -1.5, 8: 0.25})


@pytest.mark.parametrize("k", range(1, 7))
def test_engine_matches_analytic(k):
    from pauliflow.counterexample import (
        analytic_polynomial,
        counterexample_circuit,
        observable_ok,
    )
    from pauliflow.paths import accumulate_fw
    from pauliflow.pauli import ProductState

    n = 3 * (k + 1)
    c = counterexample_circuit(n)
    poly = accumulate_fw(c, observable_ok(n, k), ProductState.zeros(n))
    want = analytic_polynomial(k)
    for w in range(4 * k + 3):
        assert poly.get(w) == pytest.approx(want.get(w), abs=1e-12)


def test_truncation_error():
    from pauliflow.counterexample import analytic_fw, hypergeometric_tail, truncation_error

    x = 1 - P
    # below 2k the whole polynomial is left out
    assert truncation_error(3, 0, P) == pytest.approx((1.5 * x**2 - 0.5 * x**4) ** 3)
    assert truncation_error(3, 12, P) == 0.0
    assert truncation_error(1, 2, P) == pytest.approx(-0.5 * x**4)
    # odd cutoffs drop the same terms as the even one below
    assert truncation_error(4, 9, P) == truncation_error(4, 8, P)
    for k in (2, 5, 9):
        for ell in range(2 * k, 4 * k + 2, 2):
            truncation_error(k, ell, P, cross_check=True)
            assert truncation_error(k, ell, P) == pytest.approx(
                hypergeometric_tail(k, ell, P), rel=1e-10, abs=1e-300
            )
    assert hypergeometric_tail(2, 4, 1.0) is None
    assert truncation_error(2, 4, 1.0) == 0.0
    with pytest.raises(ValueError):
        truncation_error(2, 4, -0.1)
    with pytest.raises(ValueError):
        analytic_fw(0, 2)


def test_properties():
    from pauliflow.counterexample import sign_of_tail, truncation_error, verify_properties

    for k in range(1, 13):
        report = verify_properties(k, p=P)
        assert report.ok, report.failures
        assert set(report.passed) == {
            "zero-below-2k",
            "value-below-2k",
            "zero-above-4k",
            "sign-alternation",
            "magnitude",
        }
    assert sign_of_tail(3, 6) == -1
    assert sign_of_tail(3, 8) == 1
    assert truncation_error(3, 6, P) < 0 < truncation_error(3, 8, P)

    report = verify_properties(4, p=0.3)
    assert report.ok
    assert "magnitude" not in report.passed
    assert report.skipped


def test_magnitude_witness():
    from pauliflow.counterexample import magnitude_floor, truncation_error

    assert magnitude_floor(1, P) == pytest.approx(0.215)
    for k in range(1, 21):
        assert abs(truncation_error(k, 2 * k, P)) >= 1.215**k - 1


def test_mixed_observable():
    from pauliflow.counterexample import default_g, mixed_observable

    assert default_g(3 * 2**14) == 243
    obs = mixed_observable(36, g=2)
    assert obs.g == 2
    assert [a for a, _ in obs.terms] == [0.5, 0.5]
    assert [s.weight for _, s in obs.terms] == [4, 8]
    with pytest.raises(ValueError):
        mixed_observable(36, g=4)
    with pytest.raises(ValueError):
        mixed_observable(35, g=1)


def test_mixed_error_growth():
    from pauliflow.counterexample import error_sweep

    sweep = error_sweep(3 * 2**14, range(32, 98, 2), P)
    magnitudes = [e.magnitude for e in sweep]
    for prev, cur, e in zip(magnitudes, magnitudes[1:], sweep[1:]):
        assert cur > prev
        if e.ell >= 50:
            assert cur >= 1.1 * prev
    assert sweep[-1].magnitude > 1e4
    for e in sweep:
        if e.witness_k is not None:
            assert 8 * e.witness_k < e.ell < 9 * e.witness_k
            assert e.witness_value > 0

    empty = error_sweep(3 * 2**14, [28], P)[0]
    assert empty.witness_k is None
    assert empty.witness_value is None


def test_mixed_error_against_engine():
    from pauliflow.counterexample import (
        counterexample_circuit,
        mixed_observable,
        mixed_observable_error,
        per_term_error,
    )
    from pauliflow.paths import expectation_truncated
    from pauliflow.pauli import ProductState

    n, g, ell = 36, 2, 20
    c = counterexample_circuit(n)
    obs = mixed_observable(n, g)
    state = ProductState.zeros(n)
    full = expectation_truncated(c, obs, state, P, cutoff=None).value
    cut = expectation_truncated(c, obs, state, P, cutoff=ell).value
    err = mixed_observable_error(n, ell, P, g)
    assert full - cut == pytest.approx(err.value, abs=1e-10)
    assert math.isclose(per_term_error(n, P, g), 0.0, abs_tol=1e-300)
    assert mixed_observable_error(n, 16 * g + 1, P, g).value == 0.0


def test_circuit_shape():
    from pauliflow.circuit import validate
    from pauliflow.counterexample import counterexample_circuit, observable_ok, v_gate

    v = v_gate()
    assert v[0b011, 0b100] == 1 and v[0b100, 0b011] == 1 and v[0, 0] == 1
    c = counterexample_circuit(12)
    assert c.lattice == (3, 4)
    assert c.depth == 1
    assert validate(c) == []
    assert observable_ok(12, 2).label == "ZIIZIIIIIIII"
    with pytest.raises(ValueError):
        counterexample_circuit(10)
    with pytest.raises(ValueError):
        observable_ok(12, 5)


if __name__ == "__main__":
    test_single_gate_polynomial()
    for k in range(1, 7):
        test_engine_matches_analytic(k)
    test_truncation_error()
    test_properties()
    test_magnitude_witness()
    test_mixed_observable()
    test_mixed_error_growth()
    test_mixed_error_against_engine()
    test_circuit_shape()
