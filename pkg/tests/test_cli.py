import json

import pytest


def _circuit_file(tmp_path):
    from pauliflow.circuit import dump_circuit
    from pauliflow.ensembles import random_clifford_t_circuit

    circuit = random_clifford_t_circuit(2, 2, 3, 0.5, seed=0)
    path = tmp_path / "circuit.json"
    dump_circuit(circuit, path)
    return circuit, str(path)


def test_simulate(tmp_path):
    from pauliflow.cli import main
    from pauliflow.paths import expectation_truncated
    from pauliflow.pauli import Observable, ProductState
    from pauliflow.version import __version__

    circuit, path = _circuit_file(tmp_path)
    outs = []
    for threads in (1, 3):
        out = tmp_path / f"out{threads}.json"
        argv = ["simulate", "--circuit", path, "--obs", "Z0+0.5*X1Z3", "--p", "0.1"]
        argv += ["--ell", "6", "--threads", str(threads), "--out", str(out)]
        assert main(argv) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]

    doc = json.loads(outs[0])
    assert doc["command"] == "simulate"
    assert doc["pauliflow"]["version"] == __version__
    assert doc["pauliflow"]["seed"] == 0
    assert len(doc["pauliflow"]["config"]) == 16
    obs = Observable.parse("Z0+0.5*X1Z3", circuit.n)
    want = expectation_truncated(circuit, obs, ProductState.zeros(circuit.n), 0.1, 6).value
    assert doc["result"]["value"] == pytest.approx(want)
    assert doc["result"]["ell"] == 6
    assert len(doc["result"]["terms"]) == 2


def test_simulate_oracle_and_csv(tmp_path):
    from pauliflow.cli import main

    _, path = _circuit_file(tmp_path)
    out = tmp_path / "out.json"
    argv = ["simulate", "--circuit", path, "--obs", "Z0", "--p", "0.2", "--ell", "1000"]
    assert main(argv + ["--oracle", "--out", str(out)]) == 0
    oracle = json.loads(out.read_text())["result"]["oracle"]
    assert oracle["name"] == "density-matrix"
    assert oracle["delta"] == pytest.approx(0.0, abs=1e-9)

    out = tmp_path / "out.csv"
    assert main(argv + ["--format", "csv", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# pauliflow ")
    assert "config=" in lines[0]
    assert lines[1] == "term,w,F_w,N_w"


def test_config_hash():
    from pauliflow.cli import RunConfig

    a = RunConfig("simulate", p=0.1, ell=4, threads=1, out="a.json")
    b = RunConfig("simulate", p=0.1, ell=4, threads=8, out=None)
    c = RunConfig("simulate", p=0.2, ell=4)
    assert a.config_hash == b.config_hash
    assert a.config_hash != c.config_hash


def test_errors(tmp_path, capsys):
    from pauliflow.cli import main

    _, path = _circuit_file(tmp_path)
    base = ["simulate", "--circuit", path, "--obs", "Z0"]
    cases = [
        base + ["--p", "0.1", "--ell", "4", "--epsilon", "0.1"],
        base + ["--p", "0.1", "--epsilon", "0.1"],
        base + ["--p", "1.5", "--ell", "4"],
        base + ["--ell", "4"],
        ["simulate", "--circuit", str(tmp_path / "missing.json"), "--obs", "Z0", "--p", "0.1", "--ell", "2"],
        ["random-model", "--lattice", "2x2", "--depth", "4"],
        base + ["--p", "high", "--ell", "4"],
        ["counterexample", "--p", "0.1", "--n", "49152"],
        ["teleport"],
        [],
    ]
    for argv in cases:
        capsys.readouterr()
        assert main(argv) == 2
        err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert "error" in err
        assert "version" in err["pauliflow"]


def test_paths_and_roots(tmp_path):
    from pauliflow.cli import main

    _, path = _circuit_file(tmp_path)
    out = tmp_path / "paths.json"
    argv = ["paths", "--circuit", path, "--obs", "Z0", "--ell", "8", "--Q", "1.0", "--k", "1"]
    assert main(argv + ["--cap", "2", "--out", str(out)]) == 0
    result = json.loads(out.read_text())["result"]
    assert result["sparseness"]["k"] == 1
    assert result["counting_bound"] == 2.0**8
    assert sum(result["N_w"].values()) == result["total"]

    out = tmp_path / "roots.json"
    assert main(["roots", "--coeffs", "2:1.5,4:-0.5", "--out", str(out)]) == 0
    result = json.loads(out.read_text())["result"]
    assert result["degree"] == 4
    assert result["l2_norm"] == pytest.approx((1.5**2 + 0.5**2) ** 0.5)
    assert all(b["holds"] for b in result["radius_bounds"])


def test_ising_and_qaoa(tmp_path):
    from pauliflow.cli import main
    from pauliflow.ising import exact_ground_energy, grid_model, model_to_json

    model = grid_model(3, 2, seed=1)
    path = tmp_path / "model.json"
    path.write_text(json.dumps(model_to_json(model)))

    out = tmp_path / "exact.json"
    assert main(["ising", "--model", str(path), "--exact", "--out", str(out)]) == 0
    energy = json.loads(out.read_text())["result"]["energy"]
    assert energy == exact_ground_energy(model).energy

    out = tmp_path / "qaoa.json"
    argv = ["qaoa", "--model", str(path), "--gammas", "0.3", "--alphas", "0.2"]
    assert main(argv + ["--p", "0.01", "--epsilon", "2.0", "--out", str(out)]) == 0
    result = json.loads(out.read_text())["result"]
    assert result["branch"] == "a"
    assert result["lambda"] == 0
    assert abs(result["energy"] - energy) <= result["bound"]


def test_counterexample(tmp_path):
    from pauliflow.cli import main

    out = tmp_path / "sweep.csv"
    argv = ["counterexample", "--p", "0.1", "--n", "49152", "--ell", "32..40"]
    assert main(argv + ["--format", "csv", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[1] == "ell,abs_error,witness_k"
    assert [int(line.split(",")[0]) for line in lines[2:]] == list(range(32, 41))


def test_counterexample_ell_range(capsys):
    from pauliflow.cli import main

    argv = ["counterexample", "--p", "0.1", "--n", "49152", "--ell", "32..96"]
    assert main(argv) == 0
    rows = json.loads(capsys.readouterr().out)["result"]["rows"]
    assert [r["ell"] for r in rows] == list(range(32, 97))
    mags = [r["error"] for r in rows if r["ell"] % 2 == 0]
    assert all(b > a for a, b in zip(mags, mags[1:]))

    assert main(argv[:-1] + ["32,40,48", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert [line.split(",")[0] for line in lines[2:]] == ["32", "40", "48"]


def test_setup_logging(monkeypatch):
    import logging

    from pauliflow.logger import setup_logging

    monkeypatch.setenv("PAULIFLOW_LOG", "debug")
    assert setup_logging().level == logging.DEBUG
    logger = setup_logging("INFO")
    assert logger.level == logging.INFO
    assert len(logger.handlers) == 1
    with pytest.raises(ValueError):
        setup_logging("LOUD")
    setup_logging("WARNING")


if __name__ == "__main__":
    import tempfile
    from pathlib import Path

    with tempfile.TemporaryDirectory() as tmp:
        test_simulate(Path(tmp))
        test_simulate_oracle_and_csv(Path(tmp))
        test_config_hash()
        test_paths_and_roots(Path(tmp))
        test_ising_and_qaoa(Path(tmp))
        test_counterexample(Path(tmp))
