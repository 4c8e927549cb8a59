import math

import pytest
import torch


def test_named_gates_are_unitary():
    from pauliflow import gates as G

    for name, m in G.NAMED.items():
        assert G.is_unitary(m), name
    assert G.is_unitary(G.rz(0.3))
    assert G.is_unitary(G.rx(1.1))
    assert not G.is_unitary(torch.ones(2, 2, dtype=G.DTYPE))


def test_num_qubits():
    from pauliflow import gates as G

    assert G.num_qubits(torch.eye(2)) == 1
    assert G.num_qubits(torch.eye(8)) == 3
    with pytest.raises(ValueError):
        G.num_qubits(torch.eye(3))
    with pytest.raises(ValueError):
        G.num_qubits(torch.ones(2, 4))


def test_transfer_table():
    from pauliflow import gates as G

    table = G.transfer_table(G.NAMED["H"])
    assert table["I"] == [("I", pytest.approx(1.0))]
    assert table["X"] == [("Z", pytest.approx(1.0))]
    assert table["Y"] == [("Y", pytest.approx(-1.0))]

    # Rz(theta): U^dag X U = cos X - sin Y
    theta = 0.3
    table = G.transfer_table(G.rz(theta))
    row = dict(table["X"])
    assert row["X"] == pytest.approx(math.cos(theta))
    assert row["Y"] == pytest.approx(-math.sin(theta))
    assert dict(table["Z"]) == {"Z": pytest.approx(1.0)}

    # rows of an orthogonal transfer matrix have unit norm
    table = G.transfer_table(G.rx(0.7))
    for label, row in table.items():
        assert math.fsum(c * c for _, c in row) == pytest.approx(1.0), label


def test_transfer_table_errors():
    from pauliflow import gates as G

    with pytest.raises(ValueError):
        G.transfer_table(torch.eye(16, dtype=G.DTYPE))
    with pytest.raises(ValueError):
        G.transfer_table(2 * torch.eye(2, dtype=G.DTYPE))


def test_is_clifford():
    from pauliflow import gates as G

    for name in ("H", "S", "Sdg", "CNOT", "CZ", "SWAP"):
        assert G.is_clifford(G.NAMED[name]), name
    assert not G.is_clifford(G.NAMED["T"])
    assert not G.is_clifford(G.rz(0.3))
    assert G.is_clifford(G.rz(math.pi / 2))


if __name__ == "__main__":
    test_named_gates_are_unitary()
    test_num_qubits()
    test_transfer_table()
    test_transfer_table_errors()
    test_is_clifford()
