"""
Copyright (c) 2024 The pauliflow authors.

Command-line experiments. Every run prints a header with the version,
the seed and a hash of its configuration; identical configurations give
byte-identical outputs.
"""
import argparse
import csv
import dataclasses
import hashlib
import io
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .circuit import load_circuit
from .counterexample import error_sweep
from .dispatch import dispatch_ground_energy
from .ensembles import brickwork_architecture
from .estimators import TruncatedPathEstimator, oracle_for
from .ising import approx_ground_energy, exact_ground_energy, load_model
from .logger import setup_logging
from .paths import (
    accumulate_fw,
    choose_cutoff,
    choose_cutoff_norm,
    count_paths,
    random_model_statistics,
)
from .pauli import Observable, PauliString, ProductState
from .polynomial import (
    Inapplicable,
    WeightPolynomial,
    find_roots,
    fragility_certificate,
    l2_norm,
    root_radius_bound,
)
from .qaoa import build_qaoa, linear_swap_network, native_embedding
from .sparseness import check_sparseness
from .version import __version__

logger = logging.getLogger(__name__)

COMMANDS = ("simulate", "paths", "random-model", "qaoa", "ising", "counterexample", "roots")
# options that never change the produced numbers
_UNHASHED = ("threads", "out")


@dataclass(frozen=True)
class RunConfig:
    """One CLI invocation.

    Attributes:
        command: Subcommand name.
        p: Depolarizing rate.
        ell: Explicit cutoff.
        epsilon, q, a: Auto-cutoff triple (a defaults to 2).
        seed: Seed for sampled ensembles.
        oracle: Compare against an exact oracle.
        threads: Worker count.
        out: Output path; None writes to stdout.
        fmt: "json" or "csv".
        options: Subcommand-specific options.
    """

    command: str
    p: Optional[float] = None
    ell: Optional[int] = None
    epsilon: Optional[float] = None
    q: Optional[float] = None
    a: float = 2.0
    seed: int = 0
    oracle: bool = False
    threads: int = 1
    out: Optional[str] = None
    fmt: str = "json"
    options: Dict[str, Any] = field(default_factory=dict)

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ValueError(f"Unknown command {self.command!r}.")
        if self.fmt not in ("json", "csv"):
            raise ValueError(f"Unknown format {self.fmt!r}.")
        if self.p is not None and not 0.0 <= self.p <= 1.0:
            raise ValueError(f"--p={self.p} is outside [0, 1].")
        if self.ell is not None and self.ell < 0:
            raise ValueError(f"--ell={self.ell} is negative.")
        if self.threads < 1:
            raise ValueError("--threads must be at least 1.")
        if self.command == "simulate":
            if self.ell is not None and self.epsilon is not None:
                raise ValueError("Give either --ell or the (--epsilon, --Q, --a) triple, not both.")
            if self.ell is None and (self.epsilon is None or self.q is None):
                raise ValueError("simulate needs --ell or both --epsilon and --Q.")
            if self.p is None:
                raise ValueError("simulate needs --p.")

    @property
    def config_hash(self) -> str:
        data = dataclasses.asdict(self)
        for key in _UNHASHED:
            data.pop(key)
        blob = json.dumps(data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]

    def header(self) -> Dict[str, Any]:
        return {"version": __version__, "seed": self.seed, "config": self.config_hash}


def _lattice(text: str) -> Tuple[int, int]:
    lx, ly = text.lower().split("x")
    return int(lx), int(ly)


def _floats(text: str) -> List[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _range(text: str) -> List[int]:
    """``"32..96"`` or ``"4,8,12"``."""
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(t) for t in text.split(",") if t.strip()]


def _coeffs(text: str) -> WeightPolynomial:
    """``"2:1.5,4:-0.5"``."""
    out = {}
    for item in text.split(","):
        w, c = item.split(":")
        out[int(w)] = float(c)
    return WeightPolynomial(out)


def _poly_json(poly: WeightPolynomial) -> Dict[str, Any]:
    return {str(w): poly.get(w) for w in sorted(poly.coeffs)}


def _state(text: str, n: int) -> ProductState:
    return ProductState.from_label(text, n)


# ---------------------------------------------------------------------------
# subcommands: each returns (json payload, csv header, csv rows)
# ---------------------------------------------------------------------------

Result = Tuple[Dict[str, Any], List[str], List[List[Any]]]


def _simulate(cfg: RunConfig) -> Result:
    o = cfg.options
    circuit = load_circuit(o["circuit"])
    obs = Observable.parse(o["obs"], circuit.n)
    state = _state(o.get("state", "0"), circuit.n)
    q, q_status = cfg.q, "unverified"
    if q is not None and o.get("k") is not None:
        report = check_sparseness(circuit, q, o["k"], o.get("cap") or o["k"], cfg.threads)
        if report.status == "refuted":
            raise ValueError(f"Circuit is not ({q}, {o['k']})-sparse: witness {report.witness}.")
        q_status = "certified" if report.status == "certified" else "unverified"
    ell = cfg.ell
    if ell is None:
        per_term = cfg.epsilon / math.sqrt(obs.g)
        ell = choose_cutoff(circuit.n, circuit.depth, per_term, cfg.p, q, cfg.a)
    est = TruncatedPathEstimator(ell, q, q_status, cfg.epsilon, cfg.threads).estimate(
        circuit, obs, state, cfg.p
    )
    payload: Dict[str, Any] = {
        "value": est.value,
        "ell": est.ell,
        "bound": est.bound,
        "q": est.q,
        "q_status": est.q_status,
        "per_term_epsilon": est.per_term_epsilon,
        "terms": [
            {"coeff": a, "string": str(s), "value": v, "F_w": _poly_json(poly)}
            for (a, s, v), poly in zip(est.terms, est.polynomials)
        ],
    }
    if cfg.oracle:
        oracle = oracle_for(circuit, cfg.threads)
        exact = oracle.value(circuit, obs, state, cfg.p)
        payload["oracle"] = {"name": oracle.name, "value": exact, "delta": est.value - exact}
    rows = [
        [str(s), w, poly.get(w), poly.counts.get(w, 0)]
        for (_, s, _), poly in zip(est.terms, est.polynomials)
        for w in sorted(poly.coeffs)
    ]
    return payload, ["term", "w", "F_w", "N_w"], rows


def _paths(cfg: RunConfig) -> Result:
    o = cfg.options
    circuit = load_circuit(o["circuit"])
    obs = PauliString.parse(o["obs"], circuit.n)
    stats = count_paths(circuit, obs, cfg.ell, threads=cfg.threads)
    k = o.get("k") or 1
    payload: Dict[str, Any] = {
        "ell": cfg.ell,
        "N_w": {str(w): c for w, c in sorted(stats.counts.items())},
        "total": stats.total,
        "pruned": stats.pruned,
        "max_weight": stats.max_weight,
        "max_magic_fraction": stats.max_magic_fraction(k),
    }
    if cfg.q is not None:
        report = check_sparseness(circuit, cfg.q, k, o.get("cap") or k, cfg.threads)
        payload["sparseness"] = {
            "q": report.q,
            "k": report.k,
            "status": report.status,
            "witness": [list(v) for v in report.witness] if report.witness else None,
            "max_fraction": report.max_fraction,
            "largest_size_checked": report.largest_size_checked,
        }
        if cfg.ell is not None:
            payload["counting_bound"] = 2.0 ** (cfg.q * cfg.ell)
            payload["count_k_to_ell"] = stats.count_range(k, cfg.ell)
    rows = [[w, c] for w, c in sorted(stats.counts.items())]
    return payload, ["w", "N_w"], rows


def _random_model(cfg: RunConfig) -> Result:
    o = cfg.options
    lx, ly = _lattice(o["lattice"])
    arch = brickwork_architecture(lx, ly, o["depth"])
    if cfg.q is None or cfg.ell is None:
        raise ValueError("random-model needs --Q and --ell.")
    obs = PauliString.parse(o["obs"], arch.n) if o.get("obs") else None
    stats = random_model_statistics(
        arch, cfg.q, o["trials"], cfg.ell, cfg.seed, obs, o["policy"], cfg.threads
    )
    payload = {
        "q": stats.q,
        "ell": stats.ell,
        "trials": stats.trials,
        "mean": stats.mean,
        "stderr": stats.stderr,
        "ci": [stats.ci_low, stats.ci_high],
        "bound": stats.bound,
        "within_bound": stats.within_bound,
    }
    rows = [[i, s] for i, s in enumerate(stats.samples)]
    return payload, ["trial", "paths"], rows


def _qaoa(cfg: RunConfig) -> Result:
    o = cfg.options
    model = load_model(o["model"])
    gammas, alphas = _floats(o["gammas"]), _floats(o["alphas"])
    if len(gammas) != len(alphas):
        raise ValueError("--gammas and --alphas need the same length.")
    if o["embedding"] == "native":
        embedding = native_embedding(model)
    else:
        lattice = _lattice(o["lattice"]) if o.get("lattice") else (model.num_nodes, 1)
        embedding = linear_swap_network(lattice, model.num_nodes)
    circuit, layout = build_qaoa(model, list(zip(gammas, alphas)), embedding, o["mixer"])
    if cfg.p is None or cfg.epsilon is None:
        raise ValueError("qaoa needs --p and --epsilon.")
    report = dispatch_ground_energy(
        model,
        layout,
        circuit,
        cfg.p,
        cfg.epsilon,
        lambda_threshold=o["lambda_threshold"],
        cutoff=cfg.ell,
        a=cfg.a,
        threads=cfg.threads,
    )
    payload = {
        "branch": report.branch,
        "energy": report.estimate,
        "bound": report.bound,
        "lambda": report.lam,
        "guarantee": report.guarantee,
        "depth": circuit.depth,
        "computing_depths": list(layout.computing_depths),
        "details": report.details,
    }
    return payload, ["branch", "energy", "bound", "lambda"], [
        [report.branch, report.estimate, report.bound, report.lam]
    ]


def _ising(cfg: RunConfig) -> Result:
    o = cfg.options
    model = load_model(o["model"])
    if o.get("approx"):
        res = approx_ground_energy(
            model, epsilon=cfg.epsilon, block_size=o.get("block_size"), threads=cfg.threads
        )
        payload = {
            "energy": res.energy,
            "spins": list(res.spins),
            "bound": res.bound,
            "dropped_bound": res.dropped_bound,
            "block_size": res.decomposition.block_size,
        }
    else:
        res = exact_ground_energy(model)
        payload = {"energy": res.energy, "spins": list(res.spins)}
    return payload, ["energy"], [[payload["energy"]]]


def _counterexample(cfg: RunConfig) -> Result:
    o = cfg.options
    if cfg.p is None:
        raise ValueError("counterexample needs --p.")
    rows = error_sweep(o["n"], _range(o["ells"]), cfg.p, o.get("g"))
    payload = {
        "n": o["n"],
        "g": rows[0].g if rows else None,
        "rows": [
            {"ell": r.ell, "error": r.magnitude, "witness_k": r.witness_k} for r in rows
        ],
    }
    return payload, ["ell", "abs_error", "witness_k"], [
        [r.ell, r.magnitude, "" if r.witness_k is None else r.witness_k] for r in rows
    ]


def _roots(cfg: RunConfig) -> Result:
    o = cfg.options
    if o.get("coeffs"):
        poly = _coeffs(o["coeffs"])
        n, d = None, None
    else:
        circuit = load_circuit(o["circuit"])
        obs = PauliString.parse(o["obs"], circuit.n)
        poly = accumulate_fw(
            circuit, obs, _state(o.get("state", "0"), circuit.n), cfg.ell, cfg.threads
        )
        n, d = circuit.n, circuit.depth
    profile = find_roots(poly)
    bounds = []
    for k in range(1, poly.degree - 1):
        rb = root_radius_bound(poly, k, profile)
        bounds.append({"k": k, "bound": rb.bound, "holds": rb.holds})
    cert = fragility_certificate(poly, o["R"], cfg.epsilon or 0.1, o.get("g") or 1)
    if isinstance(cert, Inapplicable):
        cert_json: Dict[str, Any] = {"applicable": False, "reason": cert.reason}
    else:
        cert_json = {
            "applicable": True,
            "holds": cert.holds,
            "y1_prime": cert.y1_prime,
            "x_star": cert.x_star,
            "grid": cert.grid,
            "envelope": cert.envelope,
        }
    payload: Dict[str, Any] = {
        "l2_norm": l2_norm(poly),
        "degree": poly.degree,
        "roots": [[z.real, z.imag] for z in profile.roots.tolist()],
        "all_real": profile.all_real,
        "radius_bounds": bounds,
        "certificate": cert_json,
    }
    if n is not None and cfg.p is not None and 0.0 < cfg.p and cfg.epsilon is not None:
        payload["norm_cutoff"] = choose_cutoff_norm(n, d, cfg.epsilon, cfg.p, l2_norm(poly))
    rows = [[w, poly.get(w)] for w in sorted(poly.coeffs)]
    return payload, ["w", "F_w"], rows


_HANDLERS = {
    "simulate": _simulate,
    "paths": _paths,
    "random-model": _random_model,
    "qaoa": _qaoa,
    "ising": _ising,
    "counterexample": _counterexample,
    "roots": _roots,
}


def render(cfg: RunConfig, result: Result) -> str:
    payload, header, rows = result
    if cfg.fmt == "json":
        doc = {"pauliflow": cfg.header(), "command": cfg.command, "result": payload}
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"
    buf = io.StringIO()
    h = cfg.header()
    buf.write(f"# pauliflow {h['version']} seed={h['seed']} config={h['config']}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows([[repr(v) if isinstance(v, float) else v for v in row] for row in rows])
    return buf.getvalue()


def run(cfg: RunConfig) -> int:
    """Execute one configuration; 0 on success, 2 on a validation error."""
    try:
        cfg.validate()
        text = render(cfg, _HANDLERS[cfg.command](cfg))
    except (ValueError, KeyError, OSError, AssertionError, RuntimeError) as err:
        logger.debug("Run failed.", exc_info=True)
        error = {
            "pauliflow": cfg.header(),
            "error": {"type": type(err).__name__, "message": str(err)},
        }
        sys.stderr.write(json.dumps(error, sort_keys=True) + "\n")
        return 2
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return 0


class UsageError(ValueError):
    """Raised for malformed command lines instead of printing usage and exiting."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=float, default=None, help="depolarizing rate")
    common.add_argument("--epsilon", type=float, default=None, help="target precision")
    common.add_argument("--Q", dest="q", type=float, default=None, help="sparseness Q")
    common.add_argument("--a", type=float, default=2.0, help="cutoff floor a ln n")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--oracle", action="store_true", help="compare with an exact oracle")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    common.add_argument("--log-level", default=None, help="overrides $PAULIFLOW_LOG")
    cutoff = argparse.ArgumentParser(add_help=False)
    cutoff.add_argument("--ell", type=int, default=None, help="weight cutoff")

    parser = _Parser(
        prog="pauliflow", description="Noisy circuit simulation by truncated Pauli paths."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "simulate", parents=[common, cutoff], help="truncated noisy expectation value"
    )
    p.add_argument("--circuit", required=True)
    p.add_argument("--obs", required=True, help='e.g. "0.5*Z0Z1+X2"')
    p.add_argument("--state", default="0", help="per-qubit labels from 0,1,+,-,r,l")
    p.add_argument("--k", type=int, default=None, help="certify Q with this k")
    p.add_argument("--cap", type=int, default=None, help="subset size cap")

    p = sub.add_parser("paths", parents=[common, cutoff], help="path histogram and sparseness")
    p.add_argument("--circuit", required=True)
    p.add_argument("--obs", required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--cap", type=int, default=None)

    p = sub.add_parser(
        "random-model", parents=[common, cutoff], help="random-model path statistics"
    )
    p.add_argument("--lattice", required=True, help="LxxLy, e.g. 2x2")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--policy", default="always-T-when-free")
    p.add_argument("--obs", default=None)

    p = sub.add_parser("qaoa", parents=[common, cutoff], help="build QAOA and dispatch")
    p.add_argument("--model", required=True)
    p.add_argument("--embedding", choices=("native", "linear"), default="native")
    p.add_argument("--lattice", default=None)
    p.add_argument("--gammas", required=True)
    p.add_argument("--alphas", required=True)
    p.add_argument("--mixer", choices=("rx", "h-rz-h"), default="rx")
    p.add_argument("--lambda-threshold", type=int, default=4)

    p = sub.add_parser("ising", parents=[common, cutoff], help="exact or block ground energy")
    p.add_argument("--model", required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true")
    mode.add_argument("--approx", action="store_true")
    p.add_argument("--block-size", type=int, default=None)

    p = sub.add_parser("counterexample", parents=[common], help="mixed-observable error sweep")
    p.add_argument("--n", type=int, required=True)
    p.add_argument(
        "--ell", "--ells", dest="ells", required=True, help='cutoffs, e.g. "32..96" or "32,40"'
    )
    p.add_argument("--g", type=int, default=None)

    p = sub.add_parser("roots", parents=[common, cutoff], help="roots and fragility certificate")
    p.add_argument("--coeffs", default=None, help='e.g. "2:1.5,4:-0.5"')
    p.add_argument("--circuit", default=None)
    p.add_argument("--obs", default=None)
    p.add_argument("--state", default="0")
    p.add_argument("--R", type=float, default=0.5)
    p.add_argument("--g", type=int, default=None)
    return parser


_COMMON = {"p", "ell", "epsilon", "q", "a", "seed", "oracle", "threads", "out", "fmt"}


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values = vars(args).copy()
    command = values.pop("command")
    values.pop("log_level", None)
    common = {k: values.pop(k) for k in list(values) if k in _COMMON}
    return RunConfig(command=command, options=values, **common)


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as err:
        error = {
            "pauliflow": {"version": __version__, "seed": None, "config": None},
            "error": {"type": type(err).__name__, "message": str(err)},
        }
        sys.stderr.write(json.dumps(error, sort_keys=True) + "\n")
        return 2
    setup_logging(args.log_level)
    return run(config_from_args(args))
