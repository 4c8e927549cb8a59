import random

import pytest


def test_exact_sum_is_order_independent():
    from pauliflow.accumulate import ExactSum

    values = [1e16, 1.0, -1e16, 3.0, 1e-8, -2.5e-9] * 50
    reference = ExactSum(values).value
    rng = random.Random(0)
    for _ in range(10):
        shuffled = values[:]
        rng.shuffle(shuffled)
        assert ExactSum(shuffled).value == reference
    assert reference == pytest.approx(200.0 + 50 * (1e-8 - 2.5e-9))


def test_merge():
    from pauliflow.accumulate import ExactSum, merge_sums

    a, b = ExactSum([1e20, 1.0]), ExactSum([-1e20, 2.0])
    assert a.merge(b).value == 3.0
    assert float(a) == 3.0

    dst = {1: ExactSum([0.5])}
    merge_sums(dst, {1: ExactSum([0.25]), 3: ExactSum([1.0])})
    assert {k: v.value for k, v in dst.items()} == {1: 0.75, 3: 1.0}


if __name__ == "__main__":
    test_exact_sum_is_order_independent()
    test_merge()
